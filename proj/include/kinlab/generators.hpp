//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_GENERATORS_HPP
#define KINLAB_GENERATORS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>

#include "kinlab/error.hpp"
#include "kinlab/rng.hpp"
#include "kinlab/trajectory.hpp"

namespace kinlab {

// Synthetic dynamics with known spectra, used as oracles for the Koopman
// estimators.

/// Discrete Markov chain sampler; emits one-hot features (k = n states).
struct MarkovSpec {
  Eigen::MatrixXd transition;  // n x n row-stochastic
  std::int64_t length = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (transition.rows() != transition.cols() || transition.rows() < 1)
      throw Error("NonStochastic", "transition matrix must be square");
    if (length < 2) throw Error("InvalidSpec", "length must be >= 2");
    for (Eigen::Index i = 0; i < transition.rows(); ++i) {
      if (std::abs(transition.row(i).sum() - 1.0) > 1e-12)
        throw Error("NonStochastic",
                    "row " + std::to_string(i) + " does not sum to 1");
      if ((transition.row(i).array() < 0.0).any())
        throw Error("NonStochastic",
                    "row " + std::to_string(i) + " has a negative entry");
    }
  }
};

/// Sample a chain starting from state 0; deterministic in spec.seed.
inline FeatureSeries sample_markov(const MarkovSpec &spec) {
  spec.validate();
  const Eigen::Index n = spec.transition.rows();
  Rng rng(spec.seed);

  FeatureSeries series;
  series.source_id = "markov";
  series.values = Eigen::MatrixXd::Zero(spec.length, n);
  Eigen::Index state = 0;
  for (std::int64_t t = 0; t < spec.length; ++t) {
    series.values(t, state) = 1.0;
    double u = rng.next_double();
    double acc = 0.0;
    Eigen::Index next = n - 1;
    for (Eigen::Index j = 0; j < n; ++j) {
      acc += spec.transition(state, j);
      if (u < acc) {
        next = j;
        break;
      }
    }
    state = next;
  }
  return series;
}

/// Overdamped Langevin sampler on a built-in 1-D potential.
struct LangevinSpec {
  std::string potential = "double_well";  // V(x) = (x^2 - 1)^2
  double step_size = 1e-3;
  double temperature = 1.0;
  std::int64_t length = 0;
  std::uint64_t seed = 0;
  double x0 = 0.5;

  void validate() const {
    if (potential != "double_well")
      throw Error("InvalidSpec", "unknown potential '" + potential + "'");
    if (step_size <= 0.0) throw Error("InvalidSpec", "step_size must be > 0");
    if (temperature < 0.0)
      throw Error("InvalidSpec", "temperature must be >= 0");
    if (length < 2) throw Error("InvalidSpec", "length must be >= 2");
  }
};

inline double double_well_grad(double x) { return 4.0 * x * (x * x - 1.0); }

/// Euler-Maruyama update x <- x - grad V(x) h + sqrt(2 T h) xi.
inline FeatureSeries sample_langevin(const LangevinSpec &spec) {
  spec.validate();
  Rng rng(spec.seed);
  const double noise_scale =
      std::sqrt(2.0 * spec.temperature * spec.step_size);

  FeatureSeries series;
  series.source_id = "langevin:" + spec.potential;
  series.dt = spec.step_size;
  series.values.resize(spec.length, 1);
  double x = spec.x0;
  for (std::int64_t t = 0; t < spec.length; ++t) {
    series.values(t, 0) = x;
    x -= double_well_grad(x) * spec.step_size;
    if (noise_scale > 0.0) x += noise_scale * rng.next_normal();
    if (!std::isfinite(x) || std::abs(x) > 1e6)
      throw Error("UnstableIntegration",
                  "trajectory diverged at step " + std::to_string(t));
  }
  return series;
}

}  // namespace kinlab

#endif  // KINLAB_GENERATORS_HPP
