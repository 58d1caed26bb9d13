//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_RBF_HPP
#define KINLAB_RBF_HPP

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "kinlab/error.hpp"

namespace kinlab {

/// Gaussian radial basis on [0, cutoff] with a cosine cutoff envelope.
/// Centers are evenly spaced in [0, cutoff]; gamma = 1 / (2 dc^2) with dc
/// the center spacing, so adjacent Gaussians overlap at ~exp(-1/2).
struct RbfSpec {
  int n_rbf = 32;
  double cutoff = 5.0;

  void validate() const {
    if (n_rbf < 1) throw Error("InvalidSpec", "n_rbf must be >= 1");
    if (cutoff <= 0.0) throw Error("InvalidSpec", "cutoff must be > 0");
  }

  double center(int k) const {
    return n_rbf == 1 ? 0.0 : cutoff * k / (n_rbf - 1);
  }

  double gamma() const {
    double dc = n_rbf == 1 ? cutoff : cutoff / (n_rbf - 1);
    return 1.0 / (2.0 * dc * dc);
  }
};

/// Smooth envelope, 1 at d = 0 and exactly 0 at d = cutoff.
inline double cosine_cutoff(double d, double cutoff) {
  return 0.5 * (std::cos(std::numbers::pi * d / cutoff) + 1.0);
}

/// Component k: exp(-gamma (d - c_k)^2) * f_cut(d).
inline Eigen::VectorXd rbf_expand(double d, const RbfSpec &spec) {
  spec.validate();
  if (!(d > 0.0 && d <= spec.cutoff))
    throw Error("OutOfRange", "distance must lie in (0, cutoff]");
  const double gamma = spec.gamma();
  const double envelope = cosine_cutoff(d, spec.cutoff);
  Eigen::VectorXd out(spec.n_rbf);
  for (int k = 0; k < spec.n_rbf; ++k) {
    double dd = d - spec.center(k);
    out[k] = std::exp(-gamma * dd * dd) * envelope;
  }
  return out;
}

}  // namespace kinlab

#endif  // KINLAB_RBF_HPP
