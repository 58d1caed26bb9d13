//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_VAMP_HEAD_HPP
#define KINLAB_VAMP_HEAD_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "kinlab/covariance.hpp"
#include "kinlab/error.hpp"
#include "kinlab/koopman.hpp"
#include "kinlab/linalg.hpp"
#include "kinlab/pretrain.hpp"  // Adam
#include "kinlab/rng.hpp"
#include "kinlab/trajectory.hpp"

namespace kinlab {

// Trainable projection from per-frame token sets to the d-dimensional VAMP
// feature space, optimized against the VAMP-2 score.

// ---------------------------------------------------------------------------
// VAMP-2 batch loss with exact gradients.

struct Vamp2Batch {
  double score = 0.0;  // 1 + sum of clipped sigma^2
  double loss = 0.0;   // -score
  Eigen::MatrixXd grad_instant;  // dloss/d(batch_instant), B x d
  Eigen::MatrixXd grad_lagged;
};

/// Score of the batch-estimated half-weighted Koopman matrix and the exact
/// derivative of -score through the covariance, inverse-square-root and
/// SVD compositions. Covariances use the batch's own means, normalizer 1/B.
/// Singular values clipped to [0,1]; clipped directions get zero gradient.
inline Vamp2Batch vamp2_loss_and_grad(const Eigen::MatrixXd &batch_instant,
                                      const Eigen::MatrixXd &batch_lagged,
                                      double rank_epsilon = 1e-6) {
  const Eigen::Index b = batch_instant.rows();
  const Eigen::Index d = batch_instant.cols();
  if (batch_lagged.rows() != b || batch_lagged.cols() != d)
    throw Error("ShapeMismatch", "batch shapes differ");
  if (b < d + 1)
    throw Error("InvalidInput", "need batch size >= d + 1 for covariances");

  const double inv_b = 1.0 / static_cast<double>(b);
  Eigen::MatrixXd x0 =
      batch_instant.rowwise() - batch_instant.colwise().mean();
  Eigen::MatrixXd x1 =
      batch_lagged.rowwise() - batch_lagged.colwise().mean();
  Eigen::MatrixXd c00 = inv_b * x0.transpose() * x0;
  Eigen::MatrixXd c01 = inv_b * x0.transpose() * x1;
  Eigen::MatrixXd c11 = inv_b * x1.transpose() * x1;

  InvSqrt i0 = inv_sqrt(c00, rank_epsilon);
  InvSqrt i1 = inv_sqrt(c11, rank_epsilon);
  // Symmetric (k x k) form; same singular values as the rank-truncated
  // rectangular Kbar used by the koopman module.
  Eigen::MatrixXd kbar = i0.sym * c01 * i1.sym;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      kbar, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd &sigma = svd.singularValues();

  Vamp2Batch out;
  out.score = 1.0 + sigma.cwiseMin(1.0).squaredNorm();
  out.loss = -out.score;

  // d(-sum min(sigma,1)^2)/dKbar = -sum_{sigma<1} 2 sigma u v^T.
  Eigen::MatrixXd g_kbar = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] < 1.0 - 1e-12)
      g_kbar -= 2.0 * sigma[i] * svd.matrixU().col(i) *
                svd.matrixV().col(i).transpose();

  Eigen::MatrixXd g_c01 = i0.sym * g_kbar * i1.sym;
  Eigen::MatrixXd g_s0 = g_kbar * i1.sym * c01.transpose();
  Eigen::MatrixXd g_s1 = c01.transpose() * i0.sym * g_kbar;
  Eigen::MatrixXd g_c00 = inv_sqrt_backward(i0, g_s0);
  Eigen::MatrixXd g_c11 = inv_sqrt_backward(i1, g_s1);

  // Centered-data gradients; the mean path vanishes because the centered
  // matrices have zero column sums.
  out.grad_instant =
      inv_b * (2.0 * x0 * g_c00 + x1 * g_c01.transpose());
  out.grad_lagged = inv_b * (2.0 * x1 * g_c11 + x0 * g_c01);
  return out;
}

// ---------------------------------------------------------------------------
// Token mixers.

enum class MixerMode { kSum, kMlpMixer, kSelfAttention };

struct MixerConfig {
  MixerMode mode = MixerMode::kSum;
  int token_dim = 1;  // width of one token
  int n_tokens = 1;   // fixed token count (ignored by sum mode)
  int hidden = 16;    // hidden size of the mixer MLPs
  int n_heads = 1;    // single-head attention only
  int out_dim = 1;    // d

  void validate() const {
    if (token_dim < 1 || n_tokens < 1 || out_dim < 1)
      throw Error("InvalidConfig", "token_dim, n_tokens, out_dim >= 1");
    if (mode == MixerMode::kMlpMixer && hidden < 1)
      throw Error("InvalidConfig", "mlp_mixer needs hidden >= 1");
    if (mode == MixerMode::kSelfAttention && n_heads != 1)
      throw Error("InvalidConfig", "only single-head attention is supported");
  }
};

/// Mixer weights + output map. Flattening order: output map (weights then
/// bias), then the mode-specific tensors, row-major.
struct VampHeadModel {
  MixerConfig config;
  Eigen::MatrixXd out_map;  // out_dim x token_dim
  Eigen::VectorXd out_bias;  // out_dim
  // mlp_mixer
  Eigen::MatrixXd token_mix1;   // hidden x n_tokens
  Eigen::MatrixXd token_mix2;   // n_tokens x hidden
  Eigen::MatrixXd channel_mix1;  // hidden x token_dim
  Eigen::MatrixXd channel_mix2;  // token_dim x hidden
  // self_attention
  Eigen::MatrixXd token_bias;  // n_tokens x token_dim
  Eigen::MatrixXd wq, wk, wv;  // token_dim x token_dim

  Eigen::VectorXd flatten() const {
    std::vector<const Eigen::MatrixXd *> mats = tensor_list();
    Eigen::Index n = out_bias.size();
    for (auto *m : mats) n += m->size();
    Eigen::VectorXd out(n);
    Eigen::Index pos = 0;
    auto put = [&](const Eigen::MatrixXd &m) {
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out[pos++] = m(r, c);
    };
    put(out_map);
    for (Eigen::Index i = 0; i < out_bias.size(); ++i)
      out[pos++] = out_bias[i];
    for (std::size_t i = 1; i < mats.size(); ++i) put(*mats[i]);
    return out;
  }

  void unflatten(const Eigen::VectorXd &v) {
    std::vector<const Eigen::MatrixXd *> mats = tensor_list();
    Eigen::Index pos = 0;
    auto get = [&](Eigen::MatrixXd &m) {
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = v[pos++];
    };
    get(out_map);
    for (Eigen::Index i = 0; i < out_bias.size(); ++i)
      out_bias[i] = v[pos++];
    for (std::size_t i = 1; i < mats.size(); ++i)
      get(const_cast<Eigen::MatrixXd &>(*mats[i]));
    if (pos != v.size())
      throw Error("ShapeMismatch", "flattened head size mismatch");
  }

 private:
  std::vector<const Eigen::MatrixXd *> tensor_list() const {
    std::vector<const Eigen::MatrixXd *> mats = {&out_map};
    switch (config.mode) {
      case MixerMode::kSum:
        break;
      case MixerMode::kMlpMixer:
        mats.insert(mats.end(), {&token_mix1, &token_mix2, &channel_mix1,
                                 &channel_mix2});
        break;
      case MixerMode::kSelfAttention:
        mats.insert(mats.end(), {&token_bias, &wq, &wk, &wv});
        break;
    }
    return mats;
  }
};

inline VampHeadModel init_vamp_head(const MixerConfig &cfg,
                                    std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  auto fill = [&](Eigen::MatrixXd &m, Eigen::Index rows, Eigen::Index cols,
                  double fan_in) {
    m.resize(rows, cols);
    double scale = 1.0 / std::sqrt(fan_in);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        m(r, c) = scale * (2.0 * rng.next_double() - 1.0);
  };
  VampHeadModel model;
  model.config = cfg;
  fill(model.out_map, cfg.out_dim, cfg.token_dim, cfg.token_dim);
  model.out_bias = Eigen::VectorXd::Zero(cfg.out_dim);
  if (cfg.mode == MixerMode::kMlpMixer) {
    fill(model.token_mix1, cfg.hidden, cfg.n_tokens, cfg.n_tokens);
    fill(model.token_mix2, cfg.n_tokens, cfg.hidden, cfg.hidden);
    fill(model.channel_mix1, cfg.hidden, cfg.token_dim, cfg.token_dim);
    fill(model.channel_mix2, cfg.token_dim, cfg.hidden, cfg.hidden);
  } else if (cfg.mode == MixerMode::kSelfAttention) {
    model.token_bias = Eigen::MatrixXd::Zero(cfg.n_tokens, cfg.token_dim);
    fill(model.wq, cfg.token_dim, cfg.token_dim, cfg.token_dim);
    fill(model.wk, cfg.token_dim, cfg.token_dim, cfg.token_dim);
    fill(model.wv, cfg.token_dim, cfg.token_dim, cfg.token_dim);
  }
  return model;
}

struct MixerTrace {
  Eigen::MatrixXd tokens;  // input, m x w
  // mlp_mixer
  Eigen::MatrixXd tm_pre, tm_act, x1, cm_pre, cm_act, x2;
  // attention
  Eigen::MatrixXd xp, q, k, v, attn, o;
  Eigen::VectorXd pooled;  // pre-output-map vector
};

/// Map one frame's token set to the d-dimensional feature vector.
inline Eigen::VectorXd mix_tokens(const VampHeadModel &model,
                                  const Eigen::MatrixXd &tokens,
                                  MixerTrace *trace = nullptr) {
  const auto &cfg = model.config;
  if (tokens.cols() != cfg.token_dim)
    throw Error("ShapeMismatch", "token width mismatch");
  if (cfg.mode != MixerMode::kSum && tokens.rows() != cfg.n_tokens)
    throw Error("ShapeMismatch",
                "fixed-size mixer expects " + std::to_string(cfg.n_tokens) +
                    " tokens, got " + std::to_string(tokens.rows()));

  Eigen::VectorXd pooled;
  if (trace) *trace = MixerTrace{};
  switch (cfg.mode) {
    case MixerMode::kSum: {
      pooled = tokens.colwise().sum().transpose();
      break;
    }
    case MixerMode::kMlpMixer: {
      // Cross-token MLP per channel, then per-token channel MLP, then mean.
      Eigen::MatrixXd tm_pre = model.token_mix1 * tokens;  // hidden x w
      Eigen::MatrixXd tm_act = tm_pre.unaryExpr(&detail::silu);
      Eigen::MatrixXd x1 = tokens + model.token_mix2 * tm_act;
      Eigen::MatrixXd cm_pre = x1 * model.channel_mix1.transpose();
      Eigen::MatrixXd cm_act = cm_pre.unaryExpr(&detail::silu);
      Eigen::MatrixXd x2 = x1 + cm_act * model.channel_mix2.transpose();
      pooled = x2.colwise().mean().transpose();
      if (trace) {
        trace->tm_pre = std::move(tm_pre);
        trace->tm_act = std::move(tm_act);
        trace->x1 = std::move(x1);
        trace->cm_pre = std::move(cm_pre);
        trace->cm_act = std::move(cm_act);
        trace->x2 = std::move(x2);
      }
      break;
    }
    case MixerMode::kSelfAttention: {
      // Single-head scaled dot-product attention over tokens, then mean.
      Eigen::MatrixXd xp = tokens + model.token_bias;
      Eigen::MatrixXd q = xp * model.wq.transpose();
      Eigen::MatrixXd k = xp * model.wk.transpose();
      Eigen::MatrixXd v = xp * model.wv.transpose();
      double scale = 1.0 / std::sqrt(static_cast<double>(cfg.token_dim));
      Eigen::MatrixXd scores = scale * q * k.transpose();
      Eigen::MatrixXd attn(scores.rows(), scores.cols());
      for (Eigen::Index r = 0; r < scores.rows(); ++r) {
        Eigen::VectorXd row = scores.row(r).transpose();
        double mx = row.maxCoeff();
        Eigen::VectorXd e = (row.array() - mx).exp();
        attn.row(r) = (e / e.sum()).transpose();
      }
      Eigen::MatrixXd o = attn * v;
      pooled = o.colwise().mean().transpose();
      if (trace) {
        trace->xp = std::move(xp);
        trace->q = std::move(q);
        trace->k = std::move(k);
        trace->v = std::move(v);
        trace->attn = std::move(attn);
        trace->o = std::move(o);
      }
      break;
    }
  }
  if (trace) {
    trace->tokens = tokens;
    trace->pooled = pooled;
  }
  return model.out_map * pooled + model.out_bias;
}

/// Accumulate dL/d(weights) for one frame given dL/d(output).
inline void mix_backward(const VampHeadModel &model, const MixerTrace &trace,
                         const Eigen::VectorXd &grad_out,
                         VampHeadModel &grads) {
  const auto &cfg = model.config;
  grads.out_map += grad_out * trace.pooled.transpose();
  grads.out_bias += grad_out;
  Eigen::VectorXd dpooled = model.out_map.transpose() * grad_out;

  switch (cfg.mode) {
    case MixerMode::kSum:
      break;  // tokens are inputs, not weights
    case MixerMode::kMlpMixer: {
      const Eigen::Index m = trace.tokens.rows();
      Eigen::MatrixXd dx2 =
          Eigen::MatrixXd::Ones(m, 1) * dpooled.transpose() /
          static_cast<double>(m);
      // x2 = x1 + cm_act C2^T
      grads.channel_mix2 += dx2.transpose() * trace.cm_act;
      Eigen::MatrixXd dcm_act = dx2 * model.channel_mix2;
      Eigen::MatrixXd dcm_pre =
          dcm_act.array() *
          trace.cm_pre.unaryExpr(&detail::silu_grad).array();
      grads.channel_mix1 += dcm_pre.transpose() * trace.x1;
      Eigen::MatrixXd dx1 = dx2 + dcm_pre * model.channel_mix1;
      // x1 = tokens + T2 tm_act
      grads.token_mix2 += dx1 * trace.tm_act.transpose();
      Eigen::MatrixXd dtm_act = model.token_mix2.transpose() * dx1;
      Eigen::MatrixXd dtm_pre =
          dtm_act.array() *
          trace.tm_pre.unaryExpr(&detail::silu_grad).array();
      grads.token_mix1 += dtm_pre * trace.tokens.transpose();
      break;
    }
    case MixerMode::kSelfAttention: {
      const Eigen::Index m = trace.tokens.rows();
      double scale = 1.0 / std::sqrt(static_cast<double>(cfg.token_dim));
      Eigen::MatrixXd dO =
          Eigen::MatrixXd::Ones(m, 1) * dpooled.transpose() /
          static_cast<double>(m);
      Eigen::MatrixXd dattn = dO * trace.v.transpose();
      Eigen::MatrixXd dV = trace.attn.transpose() * dO;
      // Softmax backward per row.
      Eigen::MatrixXd dscores(m, m);
      for (Eigen::Index r = 0; r < m; ++r) {
        Eigen::VectorXd a = trace.attn.row(r).transpose();
        Eigen::VectorXd g = dattn.row(r).transpose();
        dscores.row(r) =
            (a.array() * (g.array() - a.dot(g))).transpose();
      }
      Eigen::MatrixXd dQ = scale * dscores * trace.k;
      Eigen::MatrixXd dK = scale * dscores.transpose() * trace.q;
      grads.wq += dQ.transpose() * trace.xp;
      grads.wk += dK.transpose() * trace.xp;
      grads.wv += dV.transpose() * trace.xp;
      Eigen::MatrixXd dxp =
          dQ * model.wq + dK * model.wk + dV * model.wv;
      grads.token_bias += dxp;
      break;
    }
  }
}

inline VampHeadModel zero_like(const VampHeadModel &model) {
  VampHeadModel g = model;
  Eigen::VectorXd flat = model.flatten();
  g.unflatten(Eigen::VectorXd::Zero(flat.size()));
  return g;
}

// ---------------------------------------------------------------------------
// Training loop.

struct VampTrainConfig {
  int epochs = 50;
  int batch_size = 5000;
  double learning_rate = 2e-4;
  std::uint64_t seed = 0;
  int early_stop_patience = 5;  // validation evaluations without improvement
  double rank_epsilon = 1e-6;
  Eigen::Index tau = 1;

  void validate() const {
    if (epochs < 1 || batch_size < 2)
      throw Error("InvalidConfig", "epochs >= 1, batch_size >= 2");
    if (learning_rate < 0.0) throw Error("InvalidConfig", "negative lr");
    if (tau < 1) throw Error("InvalidConfig", "tau >= 1");
  }
};

struct VampTrainResult {
  VampHeadModel model;
  std::vector<double> train_score;  // per-epoch mean batch score
  std::vector<double> val_score;    // full-covariance validation score
  double best_val_score = 0.0;
};

namespace detail {

/// One frame row of a flattened token series, reshaped to m x w (token 0
/// occupies the first token_dim entries).
inline Eigen::MatrixXd frame_tokens(const FeatureSeries &series,
                                    Eigen::Index t, const MixerConfig &cfg) {
  Eigen::Index m = series.dim() / cfg.token_dim;
  if (m * cfg.token_dim != series.dim())
    throw Error("ShapeMismatch",
                "series width is not a multiple of token_dim");
  Eigen::MatrixXd tokens(m, cfg.token_dim);
  for (Eigen::Index r = 0; r < m; ++r)
    tokens.row(r) = series.values.row(t).segment(r * cfg.token_dim,
                                                 cfg.token_dim);
  return tokens;
}

inline FeatureSeries project_series(const VampHeadModel &model,
                                    const FeatureSeries &series) {
  FeatureSeries out;
  out.source_id = series.source_id;
  out.dt = series.dt;
  out.values.resize(series.n_frames(), model.config.out_dim);
  for (Eigen::Index t = 0; t < series.n_frames(); ++t)
    out.values.row(t) =
        mix_tokens(model, frame_tokens(series, t, model.config)).transpose();
  return out;
}

}  // namespace detail

/// Full-covariance VAMP-2 score of the head's outputs on held-out series.
inline double evaluate_vamp_head(const VampHeadModel &model,
                                 const std::vector<FeatureSeries> &series,
                                 const LagSpec &lag,
                                 double rank_epsilon = 1e-6) {
  std::vector<FeatureSeries> projected;
  projected.reserve(series.size());
  for (const auto &s : series)
    projected.push_back(detail::project_series(model, s));
  return vamp2_score(
      half_weighted(estimate_covariances(projected, lag), rank_epsilon));
}

/// Train the head against the VAMP-2 objective. Batches are (t, t+tau)
/// frame pairs sampled within trajectories; validation uses the full
/// covariance over the held-out series.
inline VampTrainResult train_vamp(
    VampHeadModel model, const std::vector<FeatureSeries> &train_series,
    const std::vector<FeatureSeries> &val_series,
    const VampTrainConfig &config) {
  config.validate();
  if (train_series.empty() || val_series.empty())
    throw Error("InvalidInput", "train and validation series required");

  // Global pair index: (series, t) with partner t + tau.
  std::vector<std::pair<std::size_t, Eigen::Index>> pairs;
  for (std::size_t s = 0; s < train_series.size(); ++s) {
    if (train_series[s].n_frames() <= config.tau)
      throw Error("LagTooLarge", "training series shorter than lag + 1");
    for (Eigen::Index t = 0; t + config.tau < train_series[s].n_frames();
         ++t)
      pairs.emplace_back(s, t);
  }
  const Eigen::Index d = model.config.out_dim;
  if (static_cast<Eigen::Index>(pairs.size()) < d + 1)
    throw Error("InvalidInput", "not enough frames for one batch");

  Eigen::VectorXd params = model.flatten();
  Adam opt(config.learning_rate, params.size());
  LagSpec lag{config.tau};

  VampTrainResult result;
  Eigen::VectorXd best_params = params;
  double best_val = -std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng(
        derive_seed(config.seed, 4000 + static_cast<std::uint64_t>(epoch)));
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.shuffle(order);

    double epoch_score = 0.0;
    std::size_t n_batches = 0;
    const auto bs = static_cast<std::size_t>(config.batch_size);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      std::size_t stop = std::min(order.size(), start + bs);
      const auto b = static_cast<Eigen::Index>(stop - start);
      if (b < d + 1) break;  // drop a too-small trailing batch

      model.unflatten(params);
      Eigen::MatrixXd y0(b, d), y1(b, d);
      std::vector<MixerTrace> traces0(static_cast<std::size_t>(b)),
          traces1(static_cast<std::size_t>(b));
      for (Eigen::Index r = 0; r < b; ++r) {
        auto [s, t] = pairs[order[start + static_cast<std::size_t>(r)]];
        y0.row(r) = mix_tokens(model,
                               detail::frame_tokens(train_series[s], t,
                                                    model.config),
                               &traces0[static_cast<std::size_t>(r)])
                        .transpose();
        y1.row(r) = mix_tokens(model,
                               detail::frame_tokens(train_series[s],
                                                    t + config.tau,
                                                    model.config),
                               &traces1[static_cast<std::size_t>(r)])
                        .transpose();
      }

      Vamp2Batch batch =
          vamp2_loss_and_grad(y0, y1, config.rank_epsilon);
      VampHeadModel grads = zero_like(model);
      for (Eigen::Index r = 0; r < b; ++r) {
        mix_backward(model, traces0[static_cast<std::size_t>(r)],
                     batch.grad_instant.row(r).transpose(), grads);
        mix_backward(model, traces1[static_cast<std::size_t>(r)],
                     batch.grad_lagged.row(r).transpose(), grads);
      }
      opt.step(params, grads.flatten());
      epoch_score += batch.score;
      ++n_batches;
    }
    if (n_batches == 0)
      throw Error("InvalidInput", "no usable batches");
    result.train_score.push_back(epoch_score /
                                 static_cast<double>(n_batches));

    model.unflatten(params);
    double val = evaluate_vamp_head(model, val_series, lag,
                                    config.rank_epsilon);
    result.val_score.push_back(val);
    if (val > best_val) {
      best_val = val;
      best_params = params;
      since_best = 0;
    } else if (++since_best >= config.early_stop_patience) {
      break;
    }
  }

  model.unflatten(best_params);
  result.model = std::move(model);
  result.best_val_score = best_val;
  return result;
}

// ---------------------------------------------------------------------------
// VHM1 checkpoint: magic, u64 header (mode, token_dim, n_tokens, hidden,
// n_heads, out_dim), then the flattened parameter vector f64 LE.

inline void save_vamp_head(const VampHeadModel &model,
                           const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoFailure", "cannot open '" + path + "' for write");
  out.write("VHM1", 4);
  const auto &cfg = model.config;
  for (std::uint64_t v :
       {static_cast<std::uint64_t>(cfg.mode),
        static_cast<std::uint64_t>(cfg.token_dim),
        static_cast<std::uint64_t>(cfg.n_tokens),
        static_cast<std::uint64_t>(cfg.hidden),
        static_cast<std::uint64_t>(cfg.n_heads),
        static_cast<std::uint64_t>(cfg.out_dim)})
    out.write(reinterpret_cast<const char *>(&v), 8);
  Eigen::VectorXd flat = model.flatten();
  out.write(reinterpret_cast<const char *>(flat.data()),
            static_cast<std::streamsize>(flat.size() * 8));
  if (!out) throw Error("IoFailure", "short write to '" + path + "'");
}

inline VampHeadModel load_vamp_head(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoFailure", "cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "VHM1")
    throw Error("BadMagic", "not a VHM1 file");
  std::uint64_t header[6];
  for (auto &v : header) {
    in.read(reinterpret_cast<char *>(&v), 8);
    if (!in) throw Error("Truncated", "VHM1 header ends early");
  }
  MixerConfig cfg;
  cfg.mode = static_cast<MixerMode>(header[0]);
  cfg.token_dim = static_cast<int>(header[1]);
  cfg.n_tokens = static_cast<int>(header[2]);
  cfg.hidden = static_cast<int>(header[3]);
  cfg.n_heads = static_cast<int>(header[4]);
  cfg.out_dim = static_cast<int>(header[5]);
  VampHeadModel model = init_vamp_head(cfg, 0);
  Eigen::VectorXd flat(model.flatten().size());
  in.read(reinterpret_cast<char *>(flat.data()),
          static_cast<std::streamsize>(flat.size() * 8));
  if (!in) throw Error("Truncated", "VHM1 payload ends early");
  model.unflatten(flat);
  return model;
}

}  // namespace kinlab

#endif  // KINLAB_VAMP_HEAD_HPP
