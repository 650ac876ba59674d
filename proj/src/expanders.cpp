#include "twg/expanders.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "twg/error.hpp"
#include "twg/kernels.hpp"

namespace twg {

MultiGraph sample_cycle(std::uint32_t n, Rng& rng) {
  if (n < 3) fail(ErrorKind::InvalidParameter, "cycle needs n >= 3");
  auto perm = rng.permutation(n);
  // perm[i] = position of vertex i on the cycle; connect consecutive positions.
  std::vector<Vertex> at(n);
  for (Vertex v = 0; v < n; ++v) at[perm[v]] = v;
  MultiGraphBuilder b(n);
  for (Vertex p = 0; p < n; ++p) b.add_edge(at[p], at[(p + 1) % n]);
  return b.build();
}

MultiGraph sample_regular(std::uint32_t n, std::uint32_t d, Rng& rng) {
  if (d % 2 != 0 || d < 2) fail(ErrorKind::InvalidParameter, "degree must be even, >= 2");
  if (n < 3) fail(ErrorKind::InvalidParameter, "regular sample needs n >= 3");
  MultiGraphBuilder b(n);
  for (std::uint32_t c = 0; c < d / 2; ++c) {
    MultiGraph cyc = sample_cycle(n, rng);
    for (Vertex v = 0; v < n; ++v)
      for (Vertex u : cyc.neighbors(v))
        if (u >= v) b.add_edge(v, u);
  }
  return b.build();
}

namespace {

Eigen::MatrixXd dense_adjacency(const MultiGraph& g) {
  const Eigen::Index n = g.vertex_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    for (Vertex u : g.neighbors(v)) a(v, u) += 1.0;
  return a;
}

}  // namespace

double second_eigenvalue(const MultiGraph& g) {
  const std::uint32_t n = g.vertex_count();
  if (n == 0) fail(ErrorKind::InvalidParameter, "second_eigenvalue of empty graph");
  if (n == 1) fail(ErrorKind::InvalidParameter, "second_eigenvalue needs n >= 2");
  if (n <= 512) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_adjacency(g),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues()(n - 2);
  }

  const double dmax = static_cast<double>(g.max_degree());
  std::vector<double> top(n, 0.0);
  bool regular = true;
  for (Vertex v = 0; v < n; ++v)
    if (g.degree(v) != g.degree(0)) {
      regular = false;
      break;
    }
  if (regular) {
    // Exact top vector of a regular graph.
    const double c = 1.0 / std::sqrt(double(n));
    std::fill(top.begin(), top.end(), c);
  } else {
    auto t = kernels::power_top(g, dmax, 1e-10, 50000, true, nullptr, ~Vertex{0});
    if (!t.converged)
      fail(ErrorKind::NumericFailure,
           "top eigenpair did not converge, residual " + std::to_string(t.residual));
    top = std::move(t.vector);
  }
  auto r = kernels::power_top(g, dmax, 1e-8, 100000, true, &top, ~Vertex{0});
  if (!r.converged)
    fail(ErrorKind::NumericFailure,
         "second eigenvalue did not converge, residual " + std::to_string(r.residual));
  return r.value;
}

RegularSample sample_conditioned(std::uint32_t n, std::uint32_t m, double threshold,
                                 std::uint32_t max_attempts, Rng& rng) {
  if (m < 1) fail(ErrorKind::InvalidParameter, "m must be positive");
  for (std::uint32_t attempt = 1; attempt <= max_attempts; ++attempt) {
    Rng stream = rng.split(attempt);
    MultiGraph g = sample_regular(n, 2 * m, stream);
    const double l2 = second_eigenvalue(g);
    if (l2 <= threshold) return {std::move(g), attempt, l2};
  }
  fail(ErrorKind::ConditioningFailed,
       "no sample with lambda2 <= " + std::to_string(threshold) + " in " +
           std::to_string(max_attempts) + " attempts (n=" + std::to_string(n) +
           ", d=" + std::to_string(2 * m) + ")");
}

}  // namespace twg
