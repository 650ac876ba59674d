#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "twg/build.hpp"
#include "twg/multigraph.hpp"
#include "twg/spectral.hpp"

namespace twg::quantum {

struct StateVector {
  std::vector<std::complex<double>> amp;
  double time = 0.0;

  double norm() const;
  double probability(std::size_t site) const;
};

// Two-segment linear schedule: s(0) = -1, s(T/2) = 0, s(T) = 1.
struct Schedule {
  double total_time = 1.0;

  double s(double t) const {
    const double half = total_time / 2.0;
    if (t <= half) return -1.0 + t / half;
    return (t - half) / half;
  }
};

// Cached eigendecomposition of a fixed real-symmetric operator; drives
// exp(-iAt) exactly for the walk and the scans.
class Propagator {
 public:
  explicit Propagator(const spectral::CollapsedPath& p);
  Propagator(const MultiGraph& g);  // dense, n <= 2048

  StateVector evolve_basis(std::size_t start, double t) const;
  // <target| exp(-iAt) |start>
  std::complex<double> transfer_amplitude(std::size_t start, std::size_t target,
                                          double t) const;
  std::size_t dimension() const { return static_cast<std::size_t>(dim_); }

 private:
  Eigen::Index dim_ = 0;
  Eigen::MatrixXd vecs_;
  Eigen::VectorXd vals_;
};

StateVector ct_walk(const spectral::CollapsedPath& p, std::size_t start, double t);
StateVector ct_walk(const MultiGraph& g, std::size_t start, double t);

struct ScanResult {
  double best_time = 0.0;
  double best_probability = 0.0;
  std::vector<std::pair<double, double>> curve;  // (t, P_exit) samples
};

// Max over `samples` times in [0, t_max] of |<exit| exp(-iAt) |start>|^2.
ScanResult exit_scan(const spectral::CollapsedPath& p, std::size_t start,
                     std::size_t exit, double t_max, std::uint32_t samples,
                     bool parallel = true);
ScanResult exit_scan(const MultiGraph& g, std::size_t start, std::size_t exit,
                     double t_max, std::uint32_t samples, bool parallel = true);

// Integrates i d/dt psi = H(s(t)) psi from the entrance basis state with a
// per-step exact propagator of the frozen midpoint Hamiltonian.
// H(s) = -(1+s)A + s*w |entrance><entrance| on [-1,0],
// H(s) = -(1-s)A - s*w |exit><exit| on [0,1].
StateVector adiabatic_evolve(const spectral::CollapsedPath& p,
                             const Schedule& schedule, std::uint32_t steps,
                             double endpoint_weight);
StateVector adiabatic_evolve(const MultiGraph& g, const InstanceLayout& layout,
                             const Schedule& schedule, std::uint32_t steps,
                             double endpoint_weight);

// Default step count for a given total time and operator norm scale.
std::uint32_t default_steps(double total_time, double norm_scale);

}  // namespace twg::quantum
