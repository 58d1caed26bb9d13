//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_COVARIANCE_HPP
#define KINLAB_COVARIANCE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "kinlab/error.hpp"
#include "kinlab/trajectory.hpp"

namespace kinlab {

struct LagSpec {
  Eigen::Index tau = 1;  // lag in frames
};

/// Means and (time-lagged) covariances over all (t, t+tau) pairs.
struct CovarianceSet {
  Eigen::VectorXd mu0, mu1;
  Eigen::MatrixXd c00, c01, c11;
  std::int64_t n_pairs = 0;
  Eigen::Index k = 0;
};

/// Estimate covariances from one or more feature series. Pairs are formed
/// within each trajectory only: t = 0 .. T-tau-1 paired with t+tau, so
/// n_pairs = sum_traj (T_traj - tau) and the normalizer is 1 / n_pairs.
/// mu0 averages the instantaneous frames (all but the last tau of each
/// trajectory), mu1 the lagged frames (all but the first tau).
inline CovarianceSet estimate_covariances(
    const std::vector<FeatureSeries> &series, const LagSpec &lag) {
  if (series.empty()) throw Error("InvalidInput", "no feature series");
  if (lag.tau < 1) throw Error("InvalidSpec", "lag must be >= 1 frame");
  const Eigen::Index k = series.front().dim();

  CovarianceSet cov;
  cov.k = k;
  cov.mu0 = Eigen::VectorXd::Zero(k);
  cov.mu1 = Eigen::VectorXd::Zero(k);
  for (const auto &s : series) {
    s.validate();
    if (s.dim() != k)
      throw Error("ShapeMismatch", "feature dimension differs across series");
    if (s.n_frames() <= lag.tau)
      throw Error("LagTooLarge",
                  "series shorter than lag + 1 (T = " +
                      std::to_string(s.n_frames()) + ")");
    const Eigen::Index pairs = s.n_frames() - lag.tau;
    cov.n_pairs += pairs;
    cov.mu0 += s.values.topRows(pairs).colwise().sum().transpose();
    cov.mu1 += s.values.bottomRows(pairs).colwise().sum().transpose();
  }
  cov.mu0 /= static_cast<double>(cov.n_pairs);
  cov.mu1 /= static_cast<double>(cov.n_pairs);

  cov.c00 = Eigen::MatrixXd::Zero(k, k);
  cov.c01 = Eigen::MatrixXd::Zero(k, k);
  cov.c11 = Eigen::MatrixXd::Zero(k, k);
  for (const auto &s : series) {
    const Eigen::Index pairs = s.n_frames() - lag.tau;
    Eigen::MatrixXd x0 =
        s.values.topRows(pairs).rowwise() - cov.mu0.transpose();
    Eigen::MatrixXd x1 =
        s.values.bottomRows(pairs).rowwise() - cov.mu1.transpose();
    cov.c00 += x0.transpose() * x0;
    cov.c01 += x0.transpose() * x1;
    cov.c11 += x1.transpose() * x1;
  }
  const double norm = 1.0 / static_cast<double>(cov.n_pairs);
  cov.c00 *= norm;
  cov.c01 *= norm;
  cov.c11 *= norm;
  // Accumulation keeps these symmetric up to rounding; enforce exactly.
  cov.c00 = 0.5 * (cov.c00 + cov.c00.transpose()).eval();
  cov.c11 = 0.5 * (cov.c11 + cov.c11.transpose()).eval();
  return cov;
}

inline CovarianceSet estimate_covariances(const FeatureSeries &series,
                                          const LagSpec &lag) {
  return estimate_covariances(std::vector<FeatureSeries>{series}, lag);
}

}  // namespace kinlab

#endif  // KINLAB_COVARIANCE_HPP
