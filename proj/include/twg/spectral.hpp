#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "twg/build.hpp"
#include "twg/multigraph.hpp"

namespace twg::spectral {

// --- quasimomenta machinery for the boundary-weighted path A_ell(alpha) ----
//
// A_ell(alpha) is the path adjacency on [ell] with a self-loop of weight
// alpha at the last vertex. Trigonometric eigenpairs are (2cos p, sin(jp))
// for roots p of sin((ell+1)p)/sin(ell p) = alpha; the hyperbolic branch
// (2cosh x, sinh(jx)) appears for alpha > (ell+1)/ell, its mirror for
// alpha < -(ell+1)/ell, and at |alpha| = (ell+1)/ell the extra eigenvalue is
// exactly +-2 with eigenvector components j.

// sin((ell+1)p)/sin(ell p); sets *pole when sin(ell p) vanishes and returns
// the signed infinity of the one-sided limit.
double f_ell(double p, std::uint32_t ell, bool* pole = nullptr);

struct QuasimomentaSolution {
  double alpha = 0.0;
  std::uint32_t ell = 0;
  std::vector<double> trig_roots;     // ascending p in (0, pi)
  std::optional<double> hyper_root;   // x > 0, eigenvalue hyper_sign*2cosh(x)
  int hyper_sign = 1;
  bool boundary_pseudo = false;       // eigenvalue exactly +-2, eigenvector ~ j
  int pseudo_sign = 1;

  std::size_t size() const;
  // Eigenvalues in the order: trig roots first (ascending p), then the
  // special branch if present.
  double eigenvalue(std::size_t i) const;
  // Unit eigenvector for eigenvalue(i).
  std::vector<double> eigenvector(std::size_t i) const;
  std::vector<double> eigenvalues_sorted_desc() const;
};

QuasimomentaSolution solve_quasimomenta(std::uint32_t ell, double alpha);

struct PathGap {
  double top = 0.0;
  double second = 0.0;
  double gap = 0.0;
};

PathGap path_gap(std::uint32_t ell, double alpha);

// Residual ||A_ell(alpha) v - lambda v|| / ||v||, for eigenpair audits.
double path_residual(std::uint32_t ell, double alpha, double lambda,
                     const std::vector<double>& v);

// --- symmetric-subspace collapse -------------------------------------------

struct CollapsedPath {
  std::vector<double> hop;   // length-1 entries
  std::vector<double> diag;  // per-site weights
  std::uint32_t length() const { return static_cast<std::uint32_t>(diag.size()); }
};

// Tridiagonal operator with hop M/sqrt(|C_j||C_{j+1}|) and diagonal
// (within-cluster adjacency mass)/|C_j|. Decoration vertices are excluded;
// edges between non-adjacent clusters are a construction violation.
CollapsedPath collapse_clusters(const MultiGraph& g, const InstanceLayout& layout);

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
};

// Top eigenpair of the component containing `start`; shifted power iteration
// with a dense fallback for n <= 2048. start = UINT32_MAX seeds globally
// (used for norm estimates of forests).
EigenPair top_eigenpair(const MultiGraph& g, double tol = 1e-10,
                        Vertex start = 0);
EigenPair top_eigenpair(const CollapsedPath& p);

// Spectral norm of the decoration-only part A_D (every edge incident to a
// decoration vertex).
double decoration_norm(const MultiGraph& g, const InstanceLayout& layout,
                       double tol = 1e-9);

// --- decoration fixed point -------------------------------------------------

struct FixedPoint {
  double gamma = 0.0;
  double lambda_decorated = 0.0;        // lambda_T(gamma)
  std::optional<double> x;              // hyperbolic parameter when applicable
};

// Top eigenvalue of the tree with a self-loop gamma at its root, computed on
// the level-collapsed path: hyperbolic closed form when gamma >= 2 sqrt(b),
// dense tridiagonal solve otherwise.
double tree_top_eigenvalue(double gamma, const TreeSpec& tree,
                           std::optional<double>* x_out = nullptr);

// Unique gamma with lambda_G + k/gamma = lambda_T(gamma).
FixedPoint decoration_fixed_point(double lambda_g, std::uint64_t k,
                                  const TreeSpec& tree);

struct PhiVector {
  std::vector<double> level_amp;  // amplitude on each level superposition, [0]=1
  double l2 = 0.0;                // over underlying vertices
  double l1 = 0.0;                // inf if it overflows
  double log_l1 = 0.0;
};

PhiVector phi_vector(double gamma, const TreeSpec& tree);

struct Prediction {
  double lambda = 0.0;
  std::vector<double> vector;  // unit, aligned with the decorated instance
  double residual = 0.0;
};

// Assembles the decorated top eigenpair from the base eigenpair, the chained
// fixed points, and phi(gamma) on each tree; checks the residual against the
// actual adjacency. residual > tol throws PredictionMismatch.
Prediction predict_decorated_eigenpair(const MultiGraph& g,
                                       const InstanceLayout& layout,
                                       double tol = 1e-8);

struct WeightReport {
  double l2_fraction_on_original = 0.0;
  double l1_fraction_on_original = 0.0;
  std::map<std::uint16_t, double> l1_by_level;  // share of total l1 mass
  std::map<std::uint16_t, double> l2_by_level;
};

WeightReport weight_report(const std::vector<double>& vec,
                           const InstanceLayout& layout);

// --- adiabatic path ----------------------------------------------------------

// Two largest eigenvalues of -H(s) where H(s) = (1+s)H - s H'_i on [-1,0] and
// (1-s)H + s H'_f on [0,1], H = -A, H' = -w |endpoint><endpoint|.
struct SpectrumPoint {
  double s = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double gap = 0.0;
};

SpectrumPoint adiabatic_spectrum(const CollapsedPath& p, double s,
                                 double endpoint_weight);
SpectrumPoint adiabatic_spectrum(const MultiGraph& g, const InstanceLayout& layout,
                                 double s, double endpoint_weight);

std::vector<SpectrumPoint> adiabatic_sweep(const CollapsedPath& p,
                                           std::uint32_t grid_points,
                                           double endpoint_weight,
                                           bool parallel = true);

}  // namespace twg::spectral
