#pragma once

#include <Eigen/Dense>

#include "grasp/error.hpp"

namespace grasp {

/// (1 - gamma) * S + gamma * (trace(S) / d) * I. Shared by CSP and LDA.
inline Eigen::MatrixXd shrink_to_scaled_identity(const Eigen::MatrixXd& s, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail(ErrorKind::InvalidConfig, "shrinkage must lie in [0, 1]");
  if (gamma == 0.0) return s;
  const double d = static_cast<double>(s.rows());
  Eigen::MatrixXd out = (1.0 - gamma) * s;
  out.diagonal().array() += gamma * s.trace() / d;
  return out;
}

}  // namespace grasp
