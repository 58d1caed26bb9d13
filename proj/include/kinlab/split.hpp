//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_SPLIT_HPP
#define KINLAB_SPLIT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "kinlab/error.hpp"
#include "kinlab/rng.hpp"
#include "kinlab/trajectory.hpp"

namespace kinlab {

enum class SplitMode { kRandom, kTemporal, kByTrajectory };

struct SplitSpec {
  SplitMode mode = SplitMode::kRandom;
  double fraction = 0.8;  // train fraction, in (0, 1)
  std::uint64_t seed = 0;

  void validate() const {
    if (!(fraction > 0.0 && fraction < 1.0))
      throw Error("InvalidSpec", "split fraction must be in (0, 1)");
  }
};

/// Partition [0, count) into (train, validation) index sets, both sorted.
/// Temporal mode keeps the first ceil(fraction * count) items for training,
/// so max(train) < min(validation).
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t count, const SplitSpec &spec) {
  spec.validate();
  if (count < 2) throw Error("EmptySplit", "need at least 2 items to split");
  auto n_train = static_cast<std::size_t>(
      std::ceil(spec.fraction * static_cast<double>(count)));
  n_train = std::min(n_train, count);
  if (n_train == 0 || n_train == count)
    throw Error("EmptySplit", "split fraction leaves one side empty");

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  if (spec.mode != SplitMode::kTemporal) {
    Rng rng(spec.seed);
    rng.shuffle(order);
  }
  std::vector<std::size_t> train(order.begin(),
                                 order.begin() + static_cast<long>(n_train));
  std::vector<std::size_t> val(order.begin() + static_cast<long>(n_train),
                               order.end());
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  return {std::move(train), std::move(val)};
}

/// Frame-level split of a feature series (random or temporal modes).
inline std::pair<FeatureSeries, FeatureSeries> split_series(
    const FeatureSeries &series, const SplitSpec &spec) {
  if (spec.mode == SplitMode::kByTrajectory)
    throw Error("InvalidSpec",
                "by_trajectory split needs a set of trajectories");
  auto [train_idx, val_idx] =
      split_indices(static_cast<std::size_t>(series.n_frames()), spec);
  auto take = [&](const std::vector<std::size_t> &idx) {
    FeatureSeries out;
    out.source_id = series.source_id;
    out.dt = series.dt;
    out.values.resize(static_cast<Eigen::Index>(idx.size()), series.dim());
    for (std::size_t r = 0; r < idx.size(); ++r)
      out.values.row(static_cast<Eigen::Index>(r)) =
          series.values.row(static_cast<Eigen::Index>(idx[r]));
    return out;
  };
  return {take(train_idx), take(val_idx)};
}

/// Whole-trajectory assignment for any set of items (trajectories or series).
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_by_trajectory(
    const std::vector<T> &items, const SplitSpec &spec) {
  if (spec.mode != SplitMode::kByTrajectory)
    throw Error("InvalidSpec", "expected by_trajectory mode");
  SplitSpec shuffled = spec;
  shuffled.mode = SplitMode::kRandom;
  auto [train_idx, val_idx] = split_indices(items.size(), shuffled);
  std::vector<T> train, val;
  for (auto i : train_idx) train.push_back(items[i]);
  for (auto i : val_idx) val.push_back(items[i]);
  return {std::move(train), std::move(val)};
}

}  // namespace kinlab

#endif  // KINLAB_SPLIT_HPP
