#pragma once

// Binary shrinkage LDA and the one-versus-rest CSP+LDA decoder.

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

#include "grasp/csp.hpp"
#include "grasp/error.hpp"
#include "grasp/shrinkage.hpp"
#include "grasp/types.hpp"

namespace grasp {

struct LdaModel {
  Eigen::VectorXd w;
  double b = 0.0;

  double score(const Eigen::VectorXd& x) const { return w.dot(x) + b; }
};

struct DecoderConfig {
  int csp_pairs = 3;
  double csp_shrinkage = 0.05;
  double lda_shrinkage = 0.01;
  double log_epsilon = 1e-12;
};

struct OvrModel {
  struct Pair {
    CspModel csp;
    LdaModel lda;
  };
  std::vector<Pair> per_class;
  std::vector<int> class_ids;
};

/// Rows of `features` are samples; labels are 0/1. Equal priors:
/// w = S^-1 (mu1 - mu0), b = -w.(mu0 + mu1)/2 with S the shrunk pooled
/// within-class covariance.
inline LdaModel fit_lda(const Eigen::MatrixXd& features, std::span<const int> labels, double shrink) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (static_cast<std::size_t>(n) != labels.size()) fail(ErrorKind::ShapeMismatch, "features/labels length differ");

  std::array<Eigen::VectorXd, 2> mu{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  std::array<Eigen::Index, 2> count{0, 0};
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y != 0 && y != 1) fail(ErrorKind::ShapeMismatch, "LDA labels must be 0 or 1");
    mu[y] += features.row(i).transpose();
    ++count[y];
  }
  if (count[0] == 0 || count[1] == 0) fail(ErrorKind::MissingClass, "LDA needs samples from both classes");
  for (int k = 0; k < 2; ++k) mu[k] /= static_cast<double>(count[k]);

  std::array<Eigen::MatrixXd, 2> scatter{Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    const Eigen::VectorXd r = features.row(i).transpose() - mu[y];
    scatter[y].noalias() += r * r.transpose();
  }
  const double dof = static_cast<double>(std::max<Eigen::Index>(n - 2, 1));
  const Eigen::MatrixXd pooled = shrink_to_scaled_identity((scatter[0] + scatter[1]) / dof, shrink);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pooled, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmax > 0) || !(eig.eigenvalues().minCoeff() > 1e-12 * lmax))
    fail(ErrorKind::SingularCovariance, "pooled within-class covariance is singular");

  LdaModel model;
  model.w = pooled.ldlt().solve(mu[1] - mu[0]);
  model.b = -model.w.dot(mu[0] + mu[1]) / 2.0;
  return model;
}

namespace detail {

inline std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace detail

/// One-versus-rest fit over the trials selected by `idx`: for each class k,
/// CSP on (k) vs (all others pooled), then LDA on the CSP features with
/// label 1 = k.
inline OvrModel fit_ovr(std::span<const EpochStats> stats, std::span<const int> labels,
                        std::span<const std::size_t> idx, const DecoderConfig& cfg) {
  if (idx.empty()) fail(ErrorKind::MissingClass, "no training trials");
  const Eigen::Index c = stats[idx.front()].sample.rows();
  std::array<Eigen::MatrixXd, kNumClasses> class_sum;
  std::array<std::size_t, kNumClasses> class_n{};
  class_sum.fill(Eigen::MatrixXd::Zero(c, c));
  for (std::size_t i : idx) {
    const int y = labels[i];
    if (y < 0 || y >= kNumClasses) fail(ErrorKind::ShapeMismatch, "class id out of range");
    if (stats[i].sample.rows() != c) fail(ErrorKind::ShapeMismatch, "trials have different channel counts");
    class_sum[static_cast<std::size_t>(y)] += stats[i].normalized.matrix;
    ++class_n[static_cast<std::size_t>(y)];
  }
  for (int k = 0; k < kNumClasses; ++k)
    if (class_n[static_cast<std::size_t>(k)] == 0)
      fail(ErrorKind::MissingClass, "class " + std::to_string(k) + " absent from training data");

  OvrModel model;
  for (int k = 0; k < kNumClasses; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    Eigen::MatrixXd rest_sum = Eigen::MatrixXd::Zero(c, c);
    std::size_t rest_n = 0;
    for (std::size_t j = 0; j < class_sum.size(); ++j) {
      if (j == ku) continue;
      rest_sum += class_sum[j];
      rest_n += class_n[j];
    }
    OvrModel::Pair pair;
    pair.csp = fit_csp_from_means(class_sum[ku] / static_cast<double>(class_n[ku]),
                                  rest_sum / static_cast<double>(rest_n), cfg.csp_pairs, cfg.csp_shrinkage);
    pair.csp.log_epsilon = cfg.log_epsilon;

    Eigen::MatrixXd features(static_cast<Eigen::Index>(idx.size()), pair.csp.filters.rows());
    std::vector<int> binary(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      features.row(static_cast<Eigen::Index>(r)) = apply_csp(pair.csp, stats[idx[r]].sample).transpose();
      binary[r] = labels[idx[r]] == k ? 1 : 0;
    }
    pair.lda = fit_lda(features, binary, cfg.lda_shrinkage);
    model.per_class.push_back(std::move(pair));
    model.class_ids.push_back(k);
  }
  return model;
}

inline OvrModel fit_ovr(const TrialSet& trials, const DecoderConfig& cfg) {
  std::vector<EpochStats> stats;
  stats.reserve(trials.size());
  for (const auto& e : trials.epochs) stats.push_back(epoch_stats(e.data));
  const auto labels = trials.labels();
  const auto idx = detail::all_indices(trials.size());
  return fit_ovr(stats, labels, idx, cfg);
}

/// Index of the largest score; ties resolve to the lowest index.
inline int argmax_lowest(std::span<const double> scores) {
  int best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k)
    if (scores[k] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  return best;
}

inline std::vector<double> ovr_scores(const OvrModel& model, const Eigen::MatrixXd& sample_cov) {
  std::vector<double> scores;
  scores.reserve(model.per_class.size());
  for (const auto& p : model.per_class) scores.push_back(p.lda.score(apply_csp(p.csp, sample_cov)));
  return scores;
}

inline int predict_ovr(const OvrModel& model, const Eigen::MatrixXd& sample_cov) {
  const auto scores = ovr_scores(model, sample_cov);
  return model.class_ids[static_cast<std::size_t>(argmax_lowest(scores))];
}

inline int predict_ovr(const OvrModel& model, const TrialEpoch& epoch) {
  std::vector<double> scores;
  for (const auto& p : model.per_class) scores.push_back(p.lda.score(apply_csp(p.csp, epoch)));
  return model.class_ids[static_cast<std::size_t>(argmax_lowest(scores))];
}

}  // namespace grasp
