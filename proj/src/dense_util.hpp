#pragma once

#include <Eigen/Dense>

#include "twg/multigraph.hpp"

namespace twg::detail {

inline Eigen::MatrixXd dense_adjacency(const MultiGraph& g) {
  const Eigen::Index n = g.vertex_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    for (Vertex u : g.neighbors(v)) a(v, u) += 1.0;
  return a;
}

}  // namespace twg::detail
