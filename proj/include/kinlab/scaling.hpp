//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_SCALING_HPP
#define KINLAB_SCALING_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kinlab/descriptor.hpp"
#include "kinlab/error.hpp"
#include "kinlab/pretrain.hpp"

namespace kinlab {

// Experiment harness for the width/depth/cutoff/aspect-ratio scaling
// studies, plus power-law fitting with an explicit irreducible-loss floor
// and a saturation detector.

enum class SweepAxis { kWidth, kDepth, kCutoff, kAspectRatio };

struct SweepGrid {
  SweepAxis axis = SweepAxis::kWidth;
  std::vector<double> values;  // strictly increasing grid values
  DescriptorConfig base;       // fixed fields
  TrainConfig train;
  std::int64_t param_budget = 0;  // aspect_ratio mode only

  void validate() const {
    if (values.empty()) throw Error("InvalidSpec", "empty sweep grid");
    for (std::size_t i = 1; i < values.size(); ++i)
      if (!(values[i] > values[i - 1]))
        throw Error("InvalidSpec", "grid values must be strictly increasing");
    if (axis == SweepAxis::kAspectRatio && param_budget < 1)
      throw Error("InvalidSpec", "aspect_ratio sweep needs a param_budget");
  }
};

struct ScalingRecord {
  double axis_value = 0.0;
  DescriptorConfig config;
  std::int64_t n_params = 0;       // N
  std::int64_t samples_seen = 0;   // D
  double compute_proxy = 0.0;      // C = N * D
  double first_epoch_loss = 0.0;
  double converged_loss = 0.0;
};

/// Width whose parameter count is closest to the budget at the given depth
/// (ties go to the smaller width). Errors unless the achieved count is
/// within 10% of the budget.
inline int solve_width_for_budget(int depth, std::int64_t param_budget,
                                  const DescriptorConfig &fixed) {
  if (param_budget < 1)
    throw Error("InvalidSpec", "param_budget must be positive");
  DescriptorConfig cfg = fixed;
  cfg.depth = depth;
  int best_width = 0;
  std::int64_t best_dev = std::numeric_limits<std::int64_t>::max();
  for (int width = 1;; ++width) {
    cfg.width = width;
    std::int64_t n = count_parameters(cfg);
    std::int64_t dev = std::abs(n - param_budget);
    if (dev < best_dev) {
      best_dev = dev;
      best_width = width;
    }
    if (n > 2 * param_budget) break;
  }
  if (10 * best_dev > param_budget)
    throw Error("BudgetUnreachable",
                "no width within 10% of budget " +
                    std::to_string(param_budget) + " at depth " +
                    std::to_string(depth));
  return best_width;
}

inline DescriptorConfig config_for_grid_point(const SweepGrid &grid,
                                              double value) {
  DescriptorConfig cfg = grid.base;
  switch (grid.axis) {
    case SweepAxis::kWidth:
      cfg.width = static_cast<int>(value);
      break;
    case SweepAxis::kDepth:
      cfg.depth = static_cast<int>(value);
      break;
    case SweepAxis::kCutoff:
      cfg.cutoff = value;
      break;
    case SweepAxis::kAspectRatio:
      cfg.depth = static_cast<int>(value);
      cfg.width = solve_width_for_budget(cfg.depth, grid.param_budget,
                                         grid.base);
      break;
  }
  return cfg;
}

/// One pre-training run per grid value, identical seeds across points.
inline std::vector<ScalingRecord> run_sweep(
    const SweepGrid &grid, const std::vector<GeometrySample> &train_set,
    const std::vector<GeometrySample> &val_set) {
  grid.validate();
  std::vector<ScalingRecord> records;
  records.reserve(grid.values.size());
  for (double value : grid.values) {
    ScalingRecord rec;
    rec.axis_value = value;
    try {
      rec.config = config_for_grid_point(grid, value);
      DescriptorModel model = init_model(rec.config, grid.train.seed);
      auto [trained, record] =
          train(std::move(model), train_set, val_set, grid.train);
      rec.n_params = count_parameters(rec.config);
      rec.samples_seen = static_cast<std::int64_t>(record.train_loss.size()) *
                         static_cast<std::int64_t>(train_set.size());
      rec.compute_proxy = static_cast<double>(rec.n_params) *
                          static_cast<double>(rec.samples_seen);
      rec.first_epoch_loss = record.first_epoch_loss;
      rec.converged_loss = record.converged_loss;
    } catch (const Error &e) {
      throw Error(e.kind(), std::string(e.what()) + " (grid value " +
                                std::to_string(value) + ")");
    }
    records.push_back(rec);
  }
  return records;
}

// ---------------------------------------------------------------------------
// Power-law fitting: L(N) = a N^{-alpha} + c, least squares on log-space
// residuals, coarse (alpha, c) grid then Gauss-Newton refinement.

struct ScalingPoint {
  double n = 0.0;  // parameter count
  double loss = 0.0;
};

struct PowerLawFit {
  double a = 0.0;
  double alpha = 0.0;
  double c = 0.0;
  double residual = 0.0;  // RMS of log-space residuals
  double n_min = 0.0, n_max = 0.0;
  bool with_floor = true;
};

namespace detail {

inline double power_law_rms(const std::vector<ScalingPoint> &pts, double a,
                            double alpha, double c) {
  double ss = 0.0;
  for (const auto &p : pts) {
    double model = a * std::pow(p.n, -alpha) + c;
    if (!(model > 0.0)) return std::numeric_limits<double>::infinity();
    double r = std::log(model) - std::log(p.loss);
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(pts.size()));
}

inline double solve_amplitude(const std::vector<ScalingPoint> &pts,
                              double alpha, double c) {
  // log a that fits log(L - c) = log a - alpha log N over points above c.
  double acc = 0.0;
  int used = 0;
  for (const auto &p : pts) {
    double excess = p.loss - c;
    if (excess <= 0.0) continue;
    acc += std::log(excess) + alpha * std::log(p.n);
    ++used;
  }
  if (used == 0) return 0.0;
  return std::exp(acc / used);
}

}  // namespace detail

inline PowerLawFit fit_power_law(const std::vector<ScalingPoint> &points,
                                 bool with_floor = true) {
  const std::size_t min_pts = with_floor ? 3 : 2;
  if (points.size() < min_pts)
    throw Error("FitFailed", "need at least " + std::to_string(min_pts) +
                                 " records to fit");
  for (const auto &p : points)
    if (!(p.n > 0.0) || !(p.loss > 0.0) || !std::isfinite(p.loss))
      throw Error("FitFailed", "records must have positive finite N, L");

  double loss_min = std::numeric_limits<double>::infinity();
  for (const auto &p : points) loss_min = std::min(loss_min, p.loss);

  // Coarse grid.
  double best_a = loss_min, best_alpha = 0.0, best_c = 0.0;
  double best_rms = std::numeric_limits<double>::infinity();
  std::vector<double> c_grid = {0.0};
  if (with_floor)
    for (int i = 0; i < 24; ++i)
      c_grid.push_back(loss_min * 0.999 * std::pow(0.6, i));
  for (double alpha = 0.0; alpha <= 1.5 + 1e-12; alpha += 0.05)
    for (double c : c_grid) {
      double a = detail::solve_amplitude(points, alpha, c);
      if (!(a > 0.0)) continue;
      double rms = detail::power_law_rms(points, a, alpha, c);
      if (rms < best_rms) {
        best_rms = rms;
        best_a = a;
        best_alpha = alpha;
        best_c = c;
      }
    }

  // Gauss-Newton on (log a, alpha, c) with Levenberg damping.
  double log_a = std::log(best_a), alpha = best_alpha, c = best_c;
  double damping = 1e-6;
  double rms = best_rms;
  const auto n_pts = static_cast<Eigen::Index>(points.size());
  const Eigen::Index n_free = with_floor ? 3 : 2;
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::MatrixXd jac(n_pts, n_free);
    Eigen::VectorXd res(n_pts);
    for (Eigen::Index i = 0; i < n_pts; ++i) {
      const auto &p = points[static_cast<std::size_t>(i)];
      double term = std::exp(log_a) * std::pow(p.n, -alpha);
      double model = term + c;
      res[i] = std::log(model) - std::log(p.loss);
      jac(i, 0) = term / model;
      jac(i, 1) = -term * std::log(p.n) / model;
      if (with_floor) jac(i, 2) = 1.0 / model;
    }
    Eigen::MatrixXd normal = jac.transpose() * jac;
    normal.diagonal().array() += damping;
    Eigen::VectorXd step = normal.ldlt().solve(jac.transpose() * res);
    double new_log_a = log_a - step[0];
    double new_alpha = std::max(0.0, alpha - step[1]);
    double new_c = with_floor ? std::max(0.0, c - step[2]) : 0.0;
    double new_rms = detail::power_law_rms(points, std::exp(new_log_a),
                                           new_alpha, new_c);
    if (new_rms < rms) {
      log_a = new_log_a;
      alpha = new_alpha;
      c = new_c;
      if (rms - new_rms < 1e-14) {
        rms = new_rms;
        break;
      }
      rms = new_rms;
      damping = std::max(damping * 0.5, 1e-12);
    } else {
      damping *= 10.0;
      if (damping > 1e8) break;
    }
  }
  if (!std::isfinite(rms))
    throw Error("FitFailed", "fit diverged (best alpha " +
                                 std::to_string(best_alpha) + ")");

  PowerLawFit fit;
  fit.a = std::exp(log_a);
  fit.alpha = alpha;
  fit.c = c;
  fit.residual = rms;
  fit.with_floor = with_floor;
  auto [mn, mx] = std::minmax_element(
      points.begin(), points.end(),
      [](const ScalingPoint &x, const ScalingPoint &y) { return x.n < y.n; });
  fit.n_min = mn->n;
  fit.n_max = mx->n;
  return fit;
}

struct SaturationReport {
  std::vector<double> deviation;  // log-space deviation per point
  std::optional<double> onset_n;  // first N deviating > 3x fit residual
};

/// Flag the first point whose observed loss exceeds the fit prediction by
/// more than 3x the fit residual (in log space).
inline SaturationReport detect_saturation(
    const std::vector<ScalingPoint> &points, const PowerLawFit &fit) {
  SaturationReport report;
  std::vector<ScalingPoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScalingPoint &x, const ScalingPoint &y) {
              return x.n < y.n;
            });
  const double threshold = 3.0 * fit.residual + 1e-9;
  for (const auto &p : sorted) {
    double model = fit.a * std::pow(p.n, -fit.alpha) + fit.c;
    double dev = std::log(p.loss) - std::log(model);
    report.deviation.push_back(dev);
    if (!report.onset_n && dev > threshold) report.onset_n = p.n;
  }
  return report;
}

}  // namespace kinlab

#endif  // KINLAB_SCALING_HPP
