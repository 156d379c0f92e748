#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "grasp/error.hpp"

namespace grasp {

/// Repeated stratified k-fold assignment: assignments[rep][trial] = fold.
struct FoldPlan {
  int repetitions = 10;
  int folds_per_rep = 10;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> assignments;

  std::vector<std::size_t> test_indices(int rep, int fold) const {
    std::vector<std::size_t> out;
    const auto& a = assignments[static_cast<std::size_t>(rep)];
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] == fold) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> train_indices(int rep, int fold) const {
    std::vector<std::size_t> out;
    const auto& a = assignments[static_cast<std::size_t>(rep)];
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != fold) out.push_back(i);
    return out;
  }

  bool operator==(const FoldPlan&) const = default;
};

/// Deterministic generator for stream `stream` of a run seeded with `seed`.
inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

/// Per repetition, trials of each class are shuffled and dealt round-robin
/// into k folds; the dealing position carries over between classes so fold
/// sizes stay balanced too.
inline FoldPlan stratified_folds(std::span<const int> labels, int k, int reps, std::uint64_t seed) {
  if (k < 2) fail(ErrorKind::TooFewTrials, "need at least two folds");
  if (reps < 1) fail(ErrorKind::TooFewTrials, "need at least one repetition");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  if (by_class.empty()) fail(ErrorKind::TooFewTrials, "no trials");
  for (const auto& [cls, idx] : by_class)
    if (idx.size() < static_cast<std::size_t>(k))
      fail(ErrorKind::TooFewTrials, "class " + std::to_string(cls) + " has " + std::to_string(idx.size()) +
                                        " trials, fewer than " + std::to_string(k) + " folds");

  FoldPlan plan;
  plan.repetitions = reps;
  plan.folds_per_rep = k;
  plan.seed = seed;
  for (int r = 0; r < reps; ++r) {
    auto rng = seeded_rng(seed, static_cast<std::uint64_t>(r));
    std::vector<int> assign(labels.size(), -1);
    std::size_t dealt = 0;
    for (auto [cls, idx] : by_class) {
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t i : idx) assign[i] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
    }
    plan.assignments.push_back(std::move(assign));
  }
  return plan;
}

}  // namespace grasp
