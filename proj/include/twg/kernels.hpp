#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "twg/multigraph.hpp"

namespace twg::kernels {

// y = A x over the CSR adjacency; each bag entry contributes x[neighbor]
// (self-loop entries contribute x[v], i.e. diagonal = loop count).
// Row-parallel, so the OMP variant is bitwise identical to the serial one.
void spmv_serial(const MultiGraph& g, std::span<const double> x, std::span<double> y);
void spmv_omp(const MultiGraph& g, std::span<const double> x, std::span<double> y);
void spmv(const MultiGraph& g, std::span<const double> x, std::span<double> y,
          bool parallel);

// Serial fixed-order reductions; used everywhere a deterministic scalar is
// required regardless of thread count.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

struct PowerResult {
  double value = 0.0;
  std::vector<double> vector;
  std::uint32_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Shifted power iteration for the top eigenpair of A restricted to the span
// reachable from `start_vertex`'s component. `deflate` (unit vector), when
// given, is projected out every step; the result is then the top eigenpair of
// (I-dd^T)(A+shift)(I-dd^T) minus the shift.
PowerResult power_top(const MultiGraph& g, double shift, double tol,
                      std::uint32_t max_iter, bool parallel,
                      const std::vector<double>* deflate = nullptr,
                      Vertex start_vertex = 0);

}  // namespace twg::kernels
