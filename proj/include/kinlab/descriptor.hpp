//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_DESCRIPTOR_HPP
#define KINLAB_DESCRIPTOR_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kinlab/error.hpp"
#include "kinlab/radius_graph.hpp"
#include "kinlab/rbf.hpp"
#include "kinlab/rng.hpp"

namespace kinlab {

// Simplified invariant message-passing descriptor with an equivariant
// vector readout. Messages are continuous-filter convolutions: an RBF
// expansion of the edge distance is mapped to a per-channel filter that
// gates the neighbor features. The noise head emits a scalar gate per edge
// times the edge unit vector, which is rotation-equivariant by construction.

struct DescriptorConfig {
  int width = 64;
  int depth = 6;
  double cutoff = 5.0;
  int n_rbf = 32;
  int n_elements = 16;

  void validate() const {
    if (width < 1 || depth < 1 || n_rbf < 1 || n_elements < 1)
      throw Error("InvalidConfig", "width, depth, n_rbf, n_elements >= 1");
    if (cutoff <= 0.0) throw Error("InvalidConfig", "cutoff must be > 0");
  }

  RbfSpec rbf() const { return RbfSpec{n_rbf, cutoff}; }
};

/// Closed-form parameter count; must match the tensors of init_model.
inline std::int64_t count_parameters(const DescriptorConfig &cfg) {
  cfg.validate();
  const std::int64_t w = cfg.width;
  std::int64_t per_layer = w * cfg.n_rbf + 2 * w * w;
  return cfg.n_elements * w + cfg.depth * per_layer + w;
}

struct DescriptorLayer {
  Eigen::MatrixXd edge_filter;  // width x n_rbf
  Eigen::MatrixXd update1;      // width x width
  Eigen::MatrixXd update2;      // width x width
};

/// Weight tensors only; also the shape of a gradient. Flattening order is
/// fixed and shared by the optimizer and the GDM1 checkpoint format:
/// element_embedding, then per layer (edge_filter, update1, update2), then
/// gate, each row-major.
struct DescriptorParams {
  Eigen::MatrixXd element_embedding;  // n_elements x width
  std::vector<DescriptorLayer> layers;
  Eigen::VectorXd gate;  // width

  static DescriptorParams zeros(const DescriptorConfig &cfg) {
    DescriptorParams p;
    p.element_embedding =
        Eigen::MatrixXd::Zero(cfg.n_elements, cfg.width);
    p.layers.resize(static_cast<std::size_t>(cfg.depth));
    for (auto &layer : p.layers) {
      layer.edge_filter = Eigen::MatrixXd::Zero(cfg.width, cfg.n_rbf);
      layer.update1 = Eigen::MatrixXd::Zero(cfg.width, cfg.width);
      layer.update2 = Eigen::MatrixXd::Zero(cfg.width, cfg.width);
    }
    p.gate = Eigen::VectorXd::Zero(cfg.width);
    return p;
  }

  Eigen::VectorXd flatten() const {
    std::int64_t n = element_embedding.size() + gate.size();
    for (const auto &l : layers)
      n += l.edge_filter.size() + l.update1.size() + l.update2.size();
    Eigen::VectorXd out(n);
    Eigen::Index pos = 0;
    auto put = [&](const Eigen::MatrixXd &m) {
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out[pos++] = m(r, c);
    };
    put(element_embedding);
    for (const auto &l : layers) {
      put(l.edge_filter);
      put(l.update1);
      put(l.update2);
    }
    for (Eigen::Index i = 0; i < gate.size(); ++i) out[pos++] = gate[i];
    return out;
  }

  void unflatten(const Eigen::VectorXd &v) {
    Eigen::Index pos = 0;
    auto get = [&](Eigen::MatrixXd &m) {
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = v[pos++];
    };
    get(element_embedding);
    for (auto &l : layers) {
      get(l.edge_filter);
      get(l.update1);
      get(l.update2);
    }
    for (Eigen::Index i = 0; i < gate.size(); ++i) gate[i] = v[pos++];
    if (pos != v.size())
      throw Error("ShapeMismatch", "flattened parameter size mismatch");
  }
};

struct DescriptorModel {
  DescriptorConfig config;
  DescriptorParams params;
};

/// Scaled uniform init, scale 1 / sqrt(fan_in); deterministic in seed.
inline DescriptorModel init_model(const DescriptorConfig &cfg,
                                  std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  auto fill = [&](Eigen::Ref<Eigen::MatrixXd> m, double fan_in) {
    double scale = 1.0 / std::sqrt(fan_in);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        m(r, c) = scale * (2.0 * rng.next_double() - 1.0);
  };
  DescriptorModel model{cfg, DescriptorParams::zeros(cfg)};
  fill(model.params.element_embedding, 1.0);
  for (auto &layer : model.params.layers) {
    fill(layer.edge_filter, cfg.n_rbf);
    fill(layer.update1, cfg.width);
    fill(layer.update2, cfg.width);
  }
  fill(model.params.gate, cfg.width);
  return model;
}

inline std::int64_t n_parameters(const DescriptorModel &model) {
  return model.params.flatten().size();
}

namespace detail {

inline double silu(double x) { return x / (1.0 + std::exp(-x)); }

inline double silu_grad(double x) {
  double s = 1.0 / (1.0 + std::exp(-x));
  return s * (1.0 + x * (1.0 - s));
}

}  // namespace detail

/// Intermediate activations retained for the backward pass.
struct DescriptorTrace {
  Eigen::MatrixXd rbf_feats;  // n_edges x n_rbf
  std::vector<double> envelopes;  // f_cut(d) per edge
  struct LayerTrace {
    Eigen::MatrixXd h_in;   // n x width
    Eigen::MatrixXd a;      // h_in + messages
    Eigen::MatrixXd pre1;   // a W1^T
    Eigen::MatrixXd s1;     // silu(pre1)
    Eigen::MatrixXd filters;  // n_edges x width
  };
  std::vector<LayerTrace> layers;
  Eigen::MatrixXd embeddings;  // final h, n x width
  std::vector<double> gates;   // scalar gate per edge
  Eigen::MatrixXd noise_pred;  // n x 3
};

struct ForwardResult {
  Eigen::MatrixXd embeddings;  // n x width
  Eigen::MatrixXd noise_pred;  // n x 3
};

/// Full forward pass. The trace argument, when non-null, is filled for use
/// by backward().
inline ForwardResult forward(const DescriptorModel &model,
                             const RadiusGraph &graph,
                             const std::vector<int> &atomic_numbers,
                             DescriptorTrace *trace = nullptr) {
  const auto &cfg = model.config;
  const auto n = graph.n_nodes;
  if (static_cast<std::size_t>(n) != atomic_numbers.size())
    throw Error("ShapeMismatch", "graph and atomic_numbers disagree");

  const RbfSpec rbf_spec = cfg.rbf();
  const auto n_edges = static_cast<Eigen::Index>(graph.n_edges());
  Eigen::MatrixXd rbf_feats(n_edges, cfg.n_rbf);
  std::vector<double> envelopes(static_cast<std::size_t>(n_edges));
  for (Eigen::Index e = 0; e < n_edges; ++e) {
    double d = graph.distances[static_cast<std::size_t>(e)];
    rbf_feats.row(e) = rbf_expand(d, rbf_spec).transpose();
    envelopes[static_cast<std::size_t>(e)] = cosine_cutoff(d, cfg.cutoff);
  }

  Eigen::MatrixXd h(n, cfg.width);
  for (Eigen::Index i = 0; i < n; ++i) {
    int z = atomic_numbers[static_cast<std::size_t>(i)];
    // Element index = atomic number; the embedding table must cover it.
    if (z < 0 || z >= cfg.n_elements)
      throw Error("UnknownElement",
                  "element index " + std::to_string(z) +
                      " outside embedding table of size " +
                      std::to_string(cfg.n_elements));
    h.row(i) = model.params.element_embedding.row(z);
  }

  if (trace) {
    trace->rbf_feats = rbf_feats;
    trace->envelopes = envelopes;
    trace->layers.clear();
    trace->layers.reserve(model.params.layers.size());
  }

  for (const auto &layer : model.params.layers) {
    Eigen::MatrixXd filters = rbf_feats * layer.edge_filter.transpose();
    Eigen::MatrixXd messages = Eigen::MatrixXd::Zero(n, cfg.width);
    for (Eigen::Index e = 0; e < n_edges; ++e) {
      auto [i, j] = graph.edges[static_cast<std::size_t>(e)];
      messages.row(i).array() +=
          filters.row(e).array() * h.row(j).array();
    }
    Eigen::MatrixXd a = h + messages;
    Eigen::MatrixXd pre1 = a * layer.update1.transpose();
    Eigen::MatrixXd s1 = pre1.unaryExpr(&detail::silu);
    Eigen::MatrixXd update = s1 * layer.update2.transpose();
    if (trace)
      trace->layers.push_back({h, a, pre1, s1, std::move(filters)});
    h += update;
  }

  ForwardResult out;
  out.embeddings = h;
  out.noise_pred = Eigen::MatrixXd::Zero(n, 3);
  std::vector<double> gates(static_cast<std::size_t>(n_edges));
  for (Eigen::Index e = 0; e < n_edges; ++e) {
    auto [i, j] = graph.edges[static_cast<std::size_t>(e)];
    double g = (h.row(i).array() * h.row(j).array() *
                model.params.gate.transpose().array())
                   .sum() *
               envelopes[static_cast<std::size_t>(e)];
    gates[static_cast<std::size_t>(e)] = g;
    out.noise_pred.row(i) +=
        g * graph.unit_vectors[static_cast<std::size_t>(e)].transpose();
  }
  if (trace) {
    trace->embeddings = h;
    trace->gates = std::move(gates);
    trace->noise_pred = out.noise_pred;
  }
  return out;
}

/// Reverse-mode gradient of a scalar loss w.r.t. every weight, given the
/// loss gradients at the two outputs. Either output gradient may be empty
/// (treated as zero). Geometry is fixed; no coordinate gradients.
inline DescriptorParams backward(const DescriptorModel &model,
                                 const RadiusGraph &graph,
                                 const std::vector<int> &atomic_numbers,
                                 const DescriptorTrace &trace,
                                 const Eigen::MatrixXd &grad_embeddings,
                                 const Eigen::MatrixXd &grad_noise_pred) {
  const auto &cfg = model.config;
  const auto n = graph.n_nodes;
  const auto n_edges = static_cast<Eigen::Index>(graph.n_edges());

  DescriptorParams grads = DescriptorParams::zeros(cfg);
  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(n, cfg.width);
  if (grad_embeddings.size() > 0) dh = grad_embeddings;

  if (grad_noise_pred.size() > 0) {
    const Eigen::MatrixXd &h = trace.embeddings;
    for (Eigen::Index e = 0; e < n_edges; ++e) {
      auto [i, j] = graph.edges[static_cast<std::size_t>(e)];
      double dgate =
          grad_noise_pred.row(i).dot(
              graph.unit_vectors[static_cast<std::size_t>(e)].transpose()) *
          trace.envelopes[static_cast<std::size_t>(e)];
      grads.gate.array() +=
          dgate * (h.row(i).array() * h.row(j).array()).transpose();
      dh.row(i).array() +=
          dgate * model.params.gate.transpose().array() * h.row(j).array();
      dh.row(j).array() +=
          dgate * model.params.gate.transpose().array() * h.row(i).array();
    }
  }

  for (std::size_t l = model.params.layers.size(); l-- > 0;) {
    const auto &layer = model.params.layers[l];
    const auto &lt = trace.layers[l];
    // h_out = h_in + s1 W2^T, s1 = silu(a W1^T), a = h_in + messages.
    Eigen::MatrixXd ds1 = dh * layer.update2;
    grads.layers[l].update2 += dh.transpose() * lt.s1;
    Eigen::MatrixXd dpre1 =
        ds1.array() * lt.pre1.unaryExpr(&detail::silu_grad).array();
    grads.layers[l].update1 += dpre1.transpose() * lt.a;
    Eigen::MatrixXd da = dpre1 * layer.update1;
    Eigen::MatrixXd dh_in = dh + da;  // residual + direct term of a
    Eigen::MatrixXd dfilters = Eigen::MatrixXd::Zero(n_edges, cfg.width);
    for (Eigen::Index e = 0; e < n_edges; ++e) {
      auto [i, j] = graph.edges[static_cast<std::size_t>(e)];
      dh_in.row(j).array() +=
          lt.filters.row(e).array() * da.row(i).array();
      dfilters.row(e).array() =
          da.row(i).array() * lt.h_in.row(j).array();
    }
    grads.layers[l].edge_filter += dfilters.transpose() * trace.rbf_feats;
    dh = std::move(dh_in);
  }

  for (Eigen::Index i = 0; i < n; ++i)
    grads.element_embedding
        .row(atomic_numbers[static_cast<std::size_t>(i)]) += dh.row(i);
  return grads;
}

/// Per-window token pooling (non-learnable sum).
struct TokenSet {
  Eigen::MatrixXd tokens;  // m x width
  std::vector<std::vector<Eigen::Index>> grouping;
};

inline TokenSet pool(const Eigen::MatrixXd &node_embeddings,
                     const std::vector<std::vector<Eigen::Index>> &grouping) {
  if (grouping.empty()) throw Error("InvalidInput", "empty grouping");
  TokenSet set;
  set.grouping = grouping;
  set.tokens =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grouping.size()),
                            node_embeddings.cols());
  for (std::size_t t = 0; t < grouping.size(); ++t) {
    if (grouping[t].empty())
      throw Error("InvalidInput", "empty pooling window");
    for (auto i : grouping[t]) {
      if (i < 0 || i >= node_embeddings.rows())
        throw Error("InvalidInput", "pooling index out of range");
      set.tokens.row(static_cast<Eigen::Index>(t)) +=
          node_embeddings.row(i);
    }
  }
  return set;
}

/// Whole-graph pooling: one window over all nodes.
inline TokenSet pool_whole(const Eigen::MatrixXd &node_embeddings) {
  std::vector<Eigen::Index> all(
      static_cast<std::size_t>(node_embeddings.rows()));
  for (std::size_t i = 0; i < all.size(); ++i)
    all[i] = static_cast<Eigen::Index>(i);
  return pool(node_embeddings, {all});
}

}  // namespace kinlab

#endif  // KINLAB_DESCRIPTOR_HPP
