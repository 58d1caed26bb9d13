//
// Project kinlab - Copyright 2026 the kinlab authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef KINLAB_RADIUS_GRAPH_HPP
#define KINLAB_RADIUS_GRAPH_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "kinlab/error.hpp"

namespace kinlab {

/// Directed radius graph over a single frame. Both edge directions are
/// stored; unit_vectors point from source i to target j.
struct RadiusGraph {
  Eigen::Index n_nodes = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;  // (i, j), i != j
  std::vector<double> distances;
  std::vector<Eigen::Vector3d> unit_vectors;  // (x_j - x_i) / d_ij
  double cutoff = 0.0;

  std::size_t n_edges() const { return edges.size(); }
};

/// Connect every ordered pair with 0 < d_ij <= cutoff. Brute-force O(n^2);
/// fine for the few-thousand-atom systems this targets.
inline RadiusGraph build_radius_graph(const Eigen::MatrixX3d &coords,
                                      double cutoff) {
  if (coords.rows() < 1)
    throw Error("InvalidInput", "need at least one atom");
  if (!coords.allFinite())
    throw Error("InvalidInput", "non-finite coordinates");
  if (cutoff <= 0.0) throw Error("InvalidInput", "cutoff must be > 0");

  RadiusGraph graph;
  graph.n_nodes = coords.rows();
  graph.cutoff = cutoff;
  for (Eigen::Index i = 0; i < coords.rows(); ++i)
    for (Eigen::Index j = i + 1; j < coords.rows(); ++j) {
      Eigen::Vector3d delta = coords.row(j) - coords.row(i);
      double d = delta.norm();
      if (d == 0.0)
        throw Error("DegenerateGeometry",
                    "coincident atoms " + std::to_string(i) + " and " +
                        std::to_string(j));
      if (d > cutoff) continue;
      Eigen::Vector3d u = delta / d;
      graph.edges.emplace_back(i, j);
      graph.distances.push_back(d);
      graph.unit_vectors.push_back(u);
      graph.edges.emplace_back(j, i);
      graph.distances.push_back(d);
      graph.unit_vectors.push_back(-u);
    }
  return graph;
}

}  // namespace kinlab

#endif  // KINLAB_RADIUS_GRAPH_HPP
