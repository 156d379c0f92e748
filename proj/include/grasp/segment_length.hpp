#pragma once

// Subject-specific segment length: each candidate length is scored by inner
// cross-validation of the full gated decoder on training trials only.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "grasp/decoder.hpp"
#include "grasp/error.hpp"
#include "grasp/gating.hpp"

namespace grasp {

/// Sorted ascending, duplicates removed, every entry in (0, span length].
inline std::vector<double> normalized_candidates(std::vector<double> lengths, TrialSpan span) {
  if (lengths.empty()) fail(ErrorKind::InvalidConfig, "segment_lengths must not be empty");
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  for (double l : lengths)
    if (!(l > 0.0) || l > span.length() + 1e-12)
      fail(ErrorKind::BadLength, "segment length " + std::to_string(l) + " s outside (0, trial length]");
  return lengths;
}

/// Index of the candidate with the best inner-CV accuracy over `subset`.
/// Candidates are expected in ascending length, so ties go to the shorter one.
template <DecoderBackend B>
std::size_t best_candidate(const B& backend, const std::vector<std::vector<typename B::Prepared>>& per_candidate,
                           std::span<const int> labels, std::span<const std::size_t> subset, int inner_folds,
                           std::uint64_t seed, std::vector<double>* scores = nullptr) {
  std::size_t best = 0;
  double best_acc = -1.0;
  for (std::size_t c = 0; c < per_candidate.size(); ++c) {
    const double acc = per_candidate.size() == 1
                           ? 0.0
                           : inner_cv_accuracy<B>(backend, per_candidate[c], labels, subset, inner_folds, seed);
    if (scores) scores->push_back(acc);
    if (acc > best_acc) {
      best_acc = acc;
      best = c;
    }
  }
  return best;
}

/// Picks the segment length for one training set. `train` must hold epochs
/// that include the EMG channel and the pre-cue baseline.
template <DecoderBackend B = CspLdaBackend>
double choose_segment_length(const TrialSet& train, const GatingConfig& cfg, const B& backend, std::uint64_t seed) {
  const auto lengths = normalized_candidates(cfg.segment_lengths, cfg.span);
  if (lengths.size() == 1) return lengths.front();
  const auto onsets = detect_trial_onsets(train, cfg);
  std::vector<std::vector<typename B::Prepared>> per_candidate;
  for (double l : lengths) per_candidate.push_back(prepare_all(backend, gate_with_onsets(train, onsets, l, cfg.span).trials));
  const auto labels = train.labels();
  const auto subset = detail::all_indices(train.size());
  return lengths[best_candidate(backend, per_candidate, labels, subset, cfg.inner_folds, seed)];
}

}  // namespace grasp
