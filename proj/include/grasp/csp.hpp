#pragma once

// Common spatial patterns for a two-class problem.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "grasp/error.hpp"
#include "grasp/shrinkage.hpp"
#include "grasp/types.hpp"

namespace grasp {

struct CovMatrix {
  Eigen::MatrixXd matrix;
  bool normalized = true;
};

/// Second-order statistics of one epoch. `normalized` feeds CSP fitting,
/// `sample` (mean-removed, divided by n - 1) turns into log-variance features
/// without touching the samples again.
struct EpochStats {
  CovMatrix normalized;
  Eigen::MatrixXd sample;
};

struct CspModel {
  /// 2m x C, rows ordered by eigenvalue, largest first.
  Eigen::MatrixXd filters;
  Eigen::VectorXd eigenvalues;
  int m = 0;
  double log_epsilon = 1e-12;
};

/// Full decomposition of the pencil (Sa, Sa + Sb): rows of `w` are the
/// generalized eigenvectors sorted by descending eigenvalue, scaled so that
/// w (Sa + Sb) w^T = I.
struct CspDecomposition {
  Eigen::MatrixXd w;
  Eigen::VectorXd eigenvalues;
};

namespace detail {

inline Eigen::MatrixXd centered(const SignalMatrix& x) {
  Eigen::MatrixXd c = x;
  c.colwise() -= c.rowwise().mean();
  return c;
}

/// Flip each row so its largest-magnitude entry is positive.
inline void canonicalize_signs(Eigen::MatrixXd& rows) {
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    Eigen::Index arg = 0;
    rows.row(r).cwiseAbs().maxCoeff(&arg);
    if (rows(r, arg) < 0) rows.row(r) *= -1.0;
  }
}

inline Eigen::MatrixXd mean_of(std::span<const CovMatrix> covs) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(covs.front().matrix.rows(), covs.front().matrix.cols());
  for (const auto& c : covs) acc += c.matrix;
  return acc / static_cast<double>(covs.size());
}

}  // namespace detail

inline EpochStats epoch_stats(const SignalMatrix& x) {
  if (x.cols() < 2) fail(ErrorKind::DegenerateEpoch, "epoch needs at least two samples");
  const Eigen::MatrixXd c = detail::centered(x);
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(c.rows(), c.rows());
  scatter.selfadjointView<Eigen::Lower>().rankUpdate(c);
  scatter = scatter.selfadjointView<Eigen::Lower>();
  const double tr = scatter.trace();
  if (!(tr > 0.0)) fail(ErrorKind::DegenerateEpoch, "epoch has zero variance on every channel");
  EpochStats out;
  out.normalized = CovMatrix{scatter / tr, true};
  out.sample = scatter / static_cast<double>(c.cols() - 1);
  return out;
}

/// Trace-normalized covariance of the mean-centered epoch.
inline CovMatrix trial_covariance(const TrialEpoch& epoch) { return epoch_stats(epoch.data).normalized; }

inline CspDecomposition csp_decompose(const Eigen::MatrixXd& sigma_a, const Eigen::MatrixXd& sigma_b) {
  const Eigen::MatrixXd composite = sigma_a + sigma_b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> outer(composite);
  if (outer.info() != Eigen::Success) fail(ErrorKind::SingularComposite, "eigen solver failed on composite covariance");
  const Eigen::VectorXd d = outer.eigenvalues();
  if (!(d.minCoeff() > 1e-12 * std::max(d.maxCoeff(), 0.0)) || !(d.maxCoeff() > 0))
    fail(ErrorKind::SingularComposite, "composite covariance is numerically singular");

  // Whitening P = D^-1/2 U^T, then diagonalize P Sa P^T.
  const Eigen::MatrixXd p = d.cwiseSqrt().cwiseInverse().asDiagonal() * outer.eigenvectors().transpose();
  Eigen::MatrixXd whitened_a = p * sigma_a * p.transpose();
  whitened_a = 0.5 * (whitened_a + whitened_a.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> inner(whitened_a);
  if (inner.info() != Eigen::Success) fail(ErrorKind::SingularComposite, "eigen solver failed on whitened covariance");

  const Eigen::Index c = sigma_a.rows();
  CspDecomposition out;
  out.w.resize(c, c);
  out.eigenvalues.resize(c);
  // SelfAdjointEigenSolver sorts ascending; emit descending.
  for (Eigen::Index i = 0; i < c; ++i) {
    const Eigen::Index src = c - 1 - i;
    out.eigenvalues(i) = inner.eigenvalues()(src);
    out.w.row(i) = inner.eigenvectors().col(src).transpose() * p;
  }
  detail::canonicalize_signs(out.w);
  return out;
}

inline CspModel fit_csp_from_means(const Eigen::MatrixXd& mean_a, const Eigen::MatrixXd& mean_b, int m,
                                   double shrink);

inline CspModel fit_csp(std::span<const CovMatrix> class_a, std::span<const CovMatrix> class_b, int m,
                        double shrink) {
  if (class_a.empty() || class_b.empty()) fail(ErrorKind::MissingClass, "CSP needs covariances from both classes");
  const Eigen::Index c = class_a.front().matrix.rows();
  if (m < 1 || 2 * m > c) fail(ErrorKind::ShapeMismatch, "CSP pairs m must satisfy 1 <= 2m <= channels");
  return fit_csp_from_means(detail::mean_of(class_a), detail::mean_of(class_b), m, shrink);
}

/// fit_csp on already averaged class covariances.
inline CspModel fit_csp_from_means(const Eigen::MatrixXd& mean_a, const Eigen::MatrixXd& mean_b, int m,
                                   double shrink) {
  const Eigen::Index c = mean_a.rows();
  if (m < 1 || 2 * m > c) fail(ErrorKind::ShapeMismatch, "CSP pairs m must satisfy 1 <= 2m <= channels");
  const CspDecomposition full =
      csp_decompose(shrink_to_scaled_identity(mean_a, shrink), shrink_to_scaled_identity(mean_b, shrink));

  CspModel model;
  model.m = m;
  model.filters.resize(2 * m, c);
  model.eigenvalues.resize(2 * m);
  for (int i = 0; i < m; ++i) {
    model.filters.row(i) = full.w.row(i);
    model.eigenvalues(i) = full.eigenvalues(i);
    model.filters.row(2 * m - 1 - i) = full.w.row(c - 1 - i);
    model.eigenvalues(2 * m - 1 - i) = full.eigenvalues(c - 1 - i);
  }
  return model;
}

/// log(var + eps) of each filtered row, from a precomputed sample covariance.
inline Eigen::VectorXd apply_csp(const CspModel& model, const Eigen::MatrixXd& sample_cov) {
  if (sample_cov.rows() != model.filters.cols())
    fail(ErrorKind::ShapeMismatch, "epoch channel count does not match CSP filters");
  const Eigen::MatrixXd projected = model.filters * sample_cov;
  Eigen::VectorXd f(model.filters.rows());
  for (Eigen::Index j = 0; j < f.size(); ++j)
    f(j) = std::log(std::max(projected.row(j).dot(model.filters.row(j)), 0.0) + model.log_epsilon);
  return f;
}

inline Eigen::VectorXd apply_csp(const CspModel& model, const TrialEpoch& epoch) {
  if (static_cast<Eigen::Index>(epoch.n_channels()) != model.filters.cols())
    fail(ErrorKind::ShapeMismatch, "epoch channel count does not match CSP filters");
  const Eigen::MatrixXd z = model.filters * detail::centered(epoch.data);
  const double denom = static_cast<double>(std::max<Eigen::Index>(z.cols() - 1, 1));
  Eigen::VectorXd f(z.rows());
  for (Eigen::Index j = 0; j < z.rows(); ++j) f(j) = std::log(z.row(j).squaredNorm() / denom + model.log_epsilon);
  return f;
}

}  // namespace grasp
