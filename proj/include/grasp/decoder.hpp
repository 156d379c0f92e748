#pragma once

// Classifier seam used by the cross-validation harness. A backend turns each
// epoch into a label-free prepared form once, then fits and predicts on
// subsets of prepared trials selected by index.

#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

#include "grasp/csp.hpp"
#include "grasp/folds.hpp"
#include "grasp/lda.hpp"
#include "grasp/types.hpp"

namespace grasp {

template <class B>
concept DecoderBackend = requires(const B& b, const TrialEpoch& e, std::span<const typename B::Prepared> prepared,
                                  std::span<const int> labels, std::span<const std::size_t> idx,
                                  const typename B::Model& model) {
  { b.prepare(e) } -> std::convertible_to<typename B::Prepared>;
  { b.fit(prepared, labels, idx) } -> std::convertible_to<typename B::Model>;
  { b.predict(model, prepared[0]) } -> std::convertible_to<int>;
};

/// CSP + one-versus-rest LDA. Prepared form: the epoch's covariances.
struct CspLdaBackend {
  using Prepared = EpochStats;
  using Model = OvrModel;

  DecoderConfig config;

  Prepared prepare(const TrialEpoch& e) const { return epoch_stats(e.data); }

  Model fit(std::span<const Prepared> prepared, std::span<const int> labels, std::span<const std::size_t> idx) const {
    return fit_ovr(prepared, labels, idx, config);
  }

  int predict(const Model& model, const Prepared& p) const { return predict_ovr(model, p.sample); }
};

static_assert(DecoderBackend<CspLdaBackend>);

template <DecoderBackend B>
std::vector<typename B::Prepared> prepare_all(const B& backend, const TrialSet& trials) {
  std::vector<typename B::Prepared> out;
  out.reserve(trials.size());
  for (const auto& e : trials.epochs) out.push_back(backend.prepare(e));
  return out;
}

/// 5 x 5 confusion counts, rows = true class, columns = predicted.
using Confusion = std::vector<std::vector<std::size_t>>;

inline Confusion empty_confusion() { return Confusion(kNumClasses, std::vector<std::size_t>(kNumClasses, 0)); }

/// Fits on `train`, returns the accuracy on `test`; optionally accumulates
/// the confusion counts.
template <DecoderBackend B>
double holdout_accuracy(const B& backend, std::span<const typename B::Prepared> prepared, std::span<const int> labels,
                        std::span<const std::size_t> train, std::span<const std::size_t> test,
                        Confusion* confusion = nullptr) {
  const auto model = backend.fit(prepared, labels, train);
  std::size_t correct = 0;
  for (std::size_t i : test) {
    const int pred = backend.predict(model, prepared[i]);
    if (pred == labels[i]) ++correct;
    if (confusion) ++(*confusion)[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(pred)];
  }
  return test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
}

/// Mean accuracy of one stratified k-fold pass restricted to `subset`.
template <DecoderBackend B>
double inner_cv_accuracy(const B& backend, std::span<const typename B::Prepared> prepared, std::span<const int> labels,
                         std::span<const std::size_t> subset, int folds, std::uint64_t seed) {
  std::vector<int> sub_labels;
  sub_labels.reserve(subset.size());
  for (std::size_t i : subset) sub_labels.push_back(labels[i]);
  const FoldPlan plan = stratified_folds(sub_labels, folds, 1, seed);
  double acc = 0.0;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t j = 0; j < subset.size(); ++j) (plan.assignments[0][j] == f ? test : train).push_back(subset[j]);
    acc += holdout_accuracy(backend, prepared, labels, train, test);
  }
  return acc / folds;
}

}  // namespace grasp
