//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_TRAJECTORY_HPP
#define KINLAB_TRAJECTORY_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kinlab/error.hpp"

namespace kinlab {

/// Time-ordered atomic frames with a fixed composition. Coordinates are in
/// angstrom, dt is metadata only (lag times are counted in frames).
struct Trajectory {
  std::vector<Eigen::MatrixX3d> frames;
  std::vector<int> atomic_numbers;
  double dt = 1.0;
  std::string id;

  std::size_t n_frames() const { return frames.size(); }
  std::size_t n_atoms() const { return atomic_numbers.size(); }

  void validate() const {
    if (dt <= 0.0) throw Error("InvalidTrajectory", "dt must be positive");
    for (int z : atomic_numbers)
      if (z <= 0)
        throw Error("InvalidTrajectory", "atomic numbers must be positive");
    for (const auto &f : frames) {
      if (static_cast<std::size_t>(f.rows()) != n_atoms())
        throw Error("InconsistentFrames",
                    "frame atom count differs from atomic_numbers");
      if (!f.allFinite())
        throw Error("InvalidTrajectory", "non-finite coordinates");
    }
  }
};

/// T x k matrix of real-valued features chi(t), rows time-ordered.
struct FeatureSeries {
  Eigen::MatrixXd values;
  std::string source_id;
  double dt = 1.0;

  Eigen::Index n_frames() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }

  void validate() const {
    if (values.rows() < 2)
      throw Error("EmptySeries", "feature series needs at least 2 frames");
    if (!values.allFinite())
      throw Error("NonFinite", "feature series contains non-finite entries");
  }
};

}  // namespace kinlab

#endif  // KINLAB_TRAJECTORY_HPP
