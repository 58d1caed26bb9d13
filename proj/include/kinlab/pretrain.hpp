//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_PRETRAIN_HPP
#define KINLAB_PRETRAIN_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "kinlab/descriptor.hpp"
#include "kinlab/error.hpp"
#include "kinlab/radius_graph.hpp"
#include "kinlab/rng.hpp"

namespace kinlab {

// Denoising pre-training: corrupt coordinates with scaled Gaussian noise,
// train the descriptor to predict the normalized noise. The zero predictor
// scores exactly 1.0 in expectation, which is the baseline every trained
// model must beat.

struct NoiseSample {
  Eigen::MatrixX3d clean_coords;
  Eigen::MatrixX3d noised_coords;      // r + sigma * eps
  Eigen::MatrixX3d normalized_noise;   // eps, unit variance per coordinate
  double noise_level = 0.0;
};

inline NoiseSample corrupt(const Eigen::MatrixX3d &coords,
                           double noise_level, Rng &rng) {
  if (!coords.allFinite())
    throw Error("InvalidInput", "non-finite coordinates");
  if (noise_level < 0.0)
    throw Error("InvalidInput", "noise_level must be >= 0");
  NoiseSample sample;
  sample.clean_coords = coords;
  sample.noise_level = noise_level;
  sample.normalized_noise.resize(coords.rows(), 3);
  for (Eigen::Index i = 0; i < coords.rows(); ++i)
    for (int c = 0; c < 3; ++c)
      sample.normalized_noise(i, c) = rng.next_normal();
  sample.noised_coords =
      coords + noise_level * sample.normalized_noise;
  return sample;
}

inline NoiseSample corrupt(const Eigen::MatrixX3d &coords,
                           double noise_level, std::uint64_t seed) {
  Rng rng(seed);
  return corrupt(coords, noise_level, rng);
}

/// Mean over atoms and components of the squared error.
inline double denoising_loss(const Eigen::MatrixXd &noise_pred,
                             const Eigen::MatrixXd &eps) {
  if (noise_pred.rows() != eps.rows() || noise_pred.cols() != eps.cols())
    throw Error("ShapeMismatch", "prediction and noise shapes differ");
  return (noise_pred - eps).squaredNorm() /
         static_cast<double>(eps.size());
}

struct GeometrySample {
  Eigen::MatrixX3d coords;
  std::vector<int> atomic_numbers;
};

struct CorruptedSample {
  NoiseSample noise;
  std::vector<int> atomic_numbers;
};

/// Mean denoising loss over a batch and its exact reverse-mode gradient.
/// Graphs are built from the noised coordinates at the model cutoff.
inline std::pair<double, DescriptorParams> loss_and_gradients(
    const DescriptorModel &model,
    const std::vector<CorruptedSample> &batch) {
  if (batch.empty()) throw Error("InvalidInput", "empty batch");
  DescriptorParams grads = DescriptorParams::zeros(model.config);
  double loss = 0.0;
  const double batch_norm = 1.0 / static_cast<double>(batch.size());
  Eigen::VectorXd acc = grads.flatten();
  for (const auto &sample : batch) {
    RadiusGraph graph =
        build_radius_graph(sample.noise.noised_coords, model.config.cutoff);
    DescriptorTrace trace;
    ForwardResult fwd =
        forward(model, graph, sample.atomic_numbers, &trace);
    if (!fwd.noise_pred.allFinite())
      throw Error("NumericalFailure", "non-finite noise prediction");
    const Eigen::MatrixXd &eps = sample.noise.normalized_noise;
    loss += denoising_loss(fwd.noise_pred, eps) * batch_norm;
    Eigen::MatrixXd dpred = 2.0 * (fwd.noise_pred - eps) * batch_norm /
                            static_cast<double>(eps.size());
    DescriptorParams g = backward(model, graph, sample.atomic_numbers,
                                  trace, Eigen::MatrixXd(), dpred);
    acc += g.flatten();
  }
  grads.unflatten(acc);
  return {loss, grads};
}

/// Plain Adam on a flat parameter vector.
class Adam {
 public:
  Adam(double lr, Eigen::Index n, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
        m_(Eigen::VectorXd::Zero(n)), v_(Eigen::VectorXd::Zero(n)) {}

  void step(Eigen::VectorXd &params, const Eigen::VectorXd &grad) {
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
    double bc1 = 1.0 - std::pow(beta1_, t_);
    double bc2 = 1.0 - std::pow(beta2_, t_);
    params -= (lr_ / bc1) * m_.cwiseQuotient(
                                ((v_ / bc2).cwiseSqrt().array() + eps_)
                                    .matrix());
  }

  void set_learning_rate(double lr) { lr_ = lr; }
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  Eigen::VectorXd m_, v_;
  std::int64_t t_ = 0;
};

struct TrainConfig {
  double learning_rate = 5e-4;
  int batch_size = 16;
  int epochs = 10;
  double noise_level = 0.2;
  std::uint64_t seed = 0;
  int early_stop_patience = 5;

  void validate() const {
    if (learning_rate < 0.0) throw Error("InvalidConfig", "negative lr");
    if (batch_size < 1 || epochs < 1)
      throw Error("InvalidConfig", "batch_size and epochs must be >= 1");
    if (noise_level < 0.0)
      throw Error("InvalidConfig", "negative noise_level");
  }
};

struct TrainRecord {
  std::vector<double> train_loss;  // per-epoch mean
  std::vector<double> val_loss;
  std::vector<double> epoch_seconds;
  double first_epoch_loss = 0.0;
  double converged_loss = 0.0;  // best validation loss
  int best_epoch = -1;
};

/// Produces the corrupted batch for one epoch; samples are corrupted in
/// dataset order so the draw is independent of the shuffle.
using Corruptor = std::function<std::vector<CorruptedSample>(
    const std::vector<GeometrySample> &, int epoch)>;

inline Corruptor seeded_corruptor(double noise_level, std::uint64_t seed) {
  return [noise_level, seed](const std::vector<GeometrySample> &data,
                             int epoch) {
    Rng rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(epoch)));
    std::vector<CorruptedSample> out;
    out.reserve(data.size());
    for (const auto &g : data)
      out.push_back({corrupt(g.coords, noise_level, rng), g.atomic_numbers});
    return out;
  };
}

inline double validation_loss(const DescriptorModel &model,
                              const std::vector<CorruptedSample> &val) {
  double loss = 0.0;
  for (const auto &sample : val) {
    RadiusGraph graph =
        build_radius_graph(sample.noise.noised_coords, model.config.cutoff);
    ForwardResult fwd = forward(model, graph, sample.atomic_numbers);
    loss += denoising_loss(fwd.noise_pred, sample.noise.normalized_noise);
  }
  return loss / static_cast<double>(val.size());
}

/// Denoising pre-training loop: seeded shuffles, Adam updates, early stop
/// on the best validation loss. The returned model carries the best
/// validation weights. Fully deterministic in (model, data, config).
inline std::pair<DescriptorModel, TrainRecord> train(
    DescriptorModel model, const std::vector<GeometrySample> &train_set,
    const std::vector<GeometrySample> &val_set, const TrainConfig &config,
    Corruptor corruptor = nullptr) {
  config.validate();
  if (train_set.empty() || val_set.empty())
    throw Error("InvalidInput", "train and validation sets must be non-empty");
  if (!corruptor)
    corruptor = seeded_corruptor(config.noise_level, config.seed);

  // Fixed validation corruption so epochs are comparable.
  std::vector<CorruptedSample> val = corruptor(val_set, -1);

  Eigen::VectorXd params = model.params.flatten();
  Adam opt(config.learning_rate, params.size());
  TrainRecord record;
  Eigen::VectorXd best_params = params;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<CorruptedSample> corrupted = corruptor(train_set, epoch);
    std::vector<std::size_t> order(corrupted.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(
        derive_seed(config.seed, 2000 + static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      std::size_t stop = std::min(
          order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<CorruptedSample> batch;
      batch.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i)
        batch.push_back(corrupted[order[i]]);
      model.params.unflatten(params);
      double loss;
      DescriptorParams grads;
      try {
        std::tie(loss, grads) = loss_and_gradients(model, batch);
      } catch (const Error &e) {
        throw Error(e.kind(), std::string(e.what()) + " (epoch " +
                                  std::to_string(epoch) + ", step " +
                                  std::to_string(n_batches) + ")");
      }
      opt.step(params, grads.flatten());
      epoch_loss += loss;
      ++n_batches;
    }
    epoch_loss /= static_cast<double>(n_batches);

    model.params.unflatten(params);
    double vloss = validation_loss(model, val);
    auto t1 = std::chrono::steady_clock::now();
    record.train_loss.push_back(epoch_loss);
    record.val_loss.push_back(vloss);
    record.epoch_seconds.push_back(
        std::chrono::duration<double>(t1 - t0).count());
    if (epoch == 0) record.first_epoch_loss = epoch_loss;

    if (vloss < best_val) {
      best_val = vloss;
      best_params = params;
      record.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.early_stop_patience) {
      break;
    }
  }

  record.converged_loss = best_val;
  model.params.unflatten(best_params);
  return {std::move(model), std::move(record)};
}

// ---------------------------------------------------------------------------
// Toy supervised fine-tuning: pooled graph embedding -> linear scalar head.

struct ScalarHead {
  Eigen::VectorXd weights;  // width
  double bias = 0.0;
};

inline double predict_scalar(const DescriptorModel &model,
                             const ScalarHead &head,
                             const GeometrySample &sample) {
  RadiusGraph graph = build_radius_graph(sample.coords, model.config.cutoff);
  ForwardResult fwd = forward(model, graph, sample.atomic_numbers);
  Eigen::VectorXd pooled = fwd.embeddings.colwise().sum().transpose();
  return head.weights.dot(pooled) + head.bias;
}

struct FinetuneConfig {
  double learning_rate = 1e-2;
  int epochs = 200;
  std::uint64_t seed = 0;
  int plateau_patience = 8;  // halve the LR after this many stale epochs
  bool train_backbone = false;
};

struct FinetuneResult {
  ScalarHead head;
  DescriptorModel model;
  double validation_mae = 0.0;
  std::vector<double> val_mae_history;
};

/// Fit the scalar head (optionally the whole network) against per-graph
/// labels with Adam + plateau LR decay. Full-batch gradients; the toy
/// datasets are small.
inline FinetuneResult finetune_scalar(
    const DescriptorModel &model_in,
    const std::vector<GeometrySample> &train_set,
    const std::vector<double> &train_labels,
    const std::vector<GeometrySample> &val_set,
    const std::vector<double> &val_labels, const FinetuneConfig &config) {
  if (train_set.size() != train_labels.size() ||
      val_set.size() != val_labels.size())
    throw Error("ShapeMismatch", "label count differs from graph count");
  if (train_set.empty() || val_set.empty())
    throw Error("InvalidInput", "train and validation sets must be non-empty");

  FinetuneResult result;
  result.model = model_in;
  const int width = model_in.config.width;
  result.head.weights = Eigen::VectorXd::Zero(width);
  result.head.bias = 0.0;

  // Parameter vector: [head weights, bias] (+ backbone if requested).
  Eigen::VectorXd backbone = result.model.params.flatten();
  Eigen::Index n_params =
      width + 1 + (config.train_backbone ? backbone.size() : 0);
  Eigen::VectorXd params = Eigen::VectorXd::Zero(n_params);
  if (config.train_backbone) params.tail(backbone.size()) = backbone;

  Adam opt(config.learning_rate, n_params);
  double lr = config.learning_rate;
  double best_val = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_params = params;
  int since_best = 0;
  const double n_train = static_cast<double>(train_set.size());

  auto unpack = [&](const Eigen::VectorXd &p) {
    result.head.weights = p.head(width);
    result.head.bias = p[width];
    if (config.train_backbone)
      result.model.params.unflatten(p.tail(backbone.size()));
  };
  auto val_mae = [&]() {
    double mae = 0.0;
    for (std::size_t i = 0; i < val_set.size(); ++i)
      mae += std::abs(predict_scalar(result.model, result.head, val_set[i]) -
                      val_labels[i]);
    return mae / static_cast<double>(val_set.size());
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    unpack(params);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n_params);
    Eigen::VectorXd backbone_grad;
    if (config.train_backbone)
      backbone_grad = Eigen::VectorXd::Zero(backbone.size());
    for (std::size_t i = 0; i < train_set.size(); ++i) {
      RadiusGraph graph = build_radius_graph(train_set[i].coords,
                                             result.model.config.cutoff);
      DescriptorTrace trace;
      ForwardResult fwd = forward(result.model, graph,
                                  train_set[i].atomic_numbers,
                                  config.train_backbone ? &trace : nullptr);
      Eigen::VectorXd pooled = fwd.embeddings.colwise().sum().transpose();
      double pred = result.head.weights.dot(pooled) + result.head.bias;
      double resid = 2.0 * (pred - train_labels[i]) / n_train;  // MSE grad
      grad.head(width) += resid * pooled;
      grad[width] += resid;
      if (config.train_backbone) {
        Eigen::MatrixXd demb(fwd.embeddings.rows(), width);
        demb.rowwise() = (resid * result.head.weights).transpose();
        DescriptorParams g =
            backward(result.model, graph, train_set[i].atomic_numbers,
                     trace, demb, Eigen::MatrixXd());
        backbone_grad += g.flatten();
      }
    }
    if (config.train_backbone) grad.tail(backbone.size()) = backbone_grad;
    opt.step(params, grad);

    unpack(params);
    double mae = val_mae();
    result.val_mae_history.push_back(mae);
    if (mae < best_val) {
      best_val = mae;
      best_params = params;
      since_best = 0;
    } else if (++since_best >= config.plateau_patience) {
      lr *= 0.5;
      opt.set_learning_rate(lr);
      since_best = 0;
    }
  }

  unpack(best_params);
  result.validation_mae = best_val;
  return result;
}

// ---------------------------------------------------------------------------
// Toy corpus: procedurally generated small clusters relaxed to
// near-equilibrium with a Morse pair potential via overdamped Langevin
// steps. This stands in for the large pre-training corpora.

inline double toy_pair_energy(double d) {
  double e = std::exp(-1.5 * (d - 1.5));
  return e * e - 2.0 * e;
}

inline double toy_pair_force(double d) {
  // -dV/dd
  double e = std::exp(-1.5 * (d - 1.5));
  return 3.0 * (e * e - e);
}

/// Geometry-sensitive scalar label for the fine-tuning task.
inline double toy_property(const GeometrySample &sample) {
  double energy = 0.0;
  for (Eigen::Index i = 0; i < sample.coords.rows(); ++i)
    for (Eigen::Index j = i + 1; j < sample.coords.rows(); ++j) {
      double d = (sample.coords.row(j) - sample.coords.row(i)).norm();
      if (d < 6.0) energy += toy_pair_energy(d);
    }
  return energy;
}

inline GeometrySample make_toy_cluster(std::uint64_t seed) {
  Rng rng(seed);
  const int n_atoms = 4 + static_cast<int>(rng.next_below(13));  // 4..16
  static const int elements[4] = {1, 6, 7, 8};
  const int n_kinds = 2 + static_cast<int>(rng.next_below(3));  // 2..4

  GeometrySample sample;
  sample.atomic_numbers.reserve(static_cast<std::size_t>(n_atoms));
  for (int i = 0; i < n_atoms; ++i)
    sample.atomic_numbers.push_back(
        elements[rng.next_below(static_cast<std::uint64_t>(n_kinds))]);

  double box = 1.2 * std::cbrt(static_cast<double>(n_atoms));
  sample.coords.resize(n_atoms, 3);
  for (int i = 0; i < n_atoms; ++i)
    for (int c = 0; c < 3; ++c)
      sample.coords(i, c) = box * (2.0 * rng.next_double() - 1.0);

  // Langevin relaxation toward a near-equilibrium cluster.
  const double h = 0.02, temperature = 0.005;
  const double kick = std::sqrt(2.0 * temperature * h);
  for (int step = 0; step < 300; ++step) {
    Eigen::MatrixX3d force = Eigen::MatrixX3d::Zero(n_atoms, 3);
    for (int i = 0; i < n_atoms; ++i)
      for (int j = i + 1; j < n_atoms; ++j) {
        Eigen::Vector3d delta = sample.coords.row(j) - sample.coords.row(i);
        double d = std::max(delta.norm(), 0.3);
        Eigen::Vector3d f = toy_pair_force(d) * delta / d;
        force.row(i) -= f.transpose();
        force.row(j) += f.transpose();
      }
    for (int i = 0; i < n_atoms; ++i)
      for (int c = 0; c < 3; ++c)
        sample.coords(i, c) +=
            h * force(i, c) + kick * rng.next_normal();
  }
  return sample;
}

inline std::vector<GeometrySample> make_toy_corpus(std::size_t n_samples,
                                                   std::uint64_t seed) {
  std::vector<GeometrySample> corpus;
  corpus.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    corpus.push_back(make_toy_cluster(derive_seed(seed, i)));
  return corpus;
}

}  // namespace kinlab

#endif  // KINLAB_PRETRAIN_HPP
