#include "twg/quantum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "dense_util.hpp"
#include "twg/error.hpp"

namespace twg::quantum {

namespace {

using Complex = std::complex<double>;

Eigen::MatrixXd collapsed_dense(const spectral::CollapsedPath& p) {
  const Eigen::Index n = p.length();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = p.diag[i];
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = p.hop[i];
  }
  return a;
}

// psi <- exp(-i H dt) psi for a dense symmetric H via eigendecomposition.
void step_exact(const Eigen::MatrixXd& h, Eigen::VectorXcd& psi, double dt) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success)
    fail(ErrorKind::NumericFailure, "dense eigensolver failed");
  Eigen::VectorXcd y = es.eigenvectors().transpose() * psi;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    y(i) *= std::polar(1.0, -es.eigenvalues()(i) * dt);
  psi = es.eigenvectors() * y;
}

// Lanczos propagator for a Hermitian operator given as an apply() callback;
// exact arithmetic on the Krylov tridiagonal keeps the step unitary to
// rounding.
template <class Apply>
void step_krylov(const Apply& apply, std::vector<Complex>& psi, double dt,
                 std::size_t kdim) {
  const std::size_t n = psi.size();
  const std::size_t m = std::min(kdim, n);
  std::vector<std::vector<Complex>> basis;
  basis.reserve(m);
  std::vector<double> alpha, beta;

  double nrm0 = 0.0;
  for (const auto& c : psi) nrm0 += std::norm(c);
  nrm0 = std::sqrt(nrm0);
  if (nrm0 == 0.0) fail(ErrorKind::NumericFailure, "zero state");
  std::vector<Complex> v(n), w(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = psi[i] / nrm0;
  basis.push_back(v);

  for (std::size_t j = 0; j < m; ++j) {
    apply(basis[j], w);
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      a += std::real(std::conj(basis[j][i]) * w[i]);
    alpha.push_back(a);
    for (std::size_t i = 0; i < n; ++i) w[i] -= a * basis[j][i];
    if (j > 0)
      for (std::size_t i = 0; i < n; ++i) w[i] -= beta[j - 1] * basis[j - 1][i];
    double b = 0.0;
    for (const auto& c : w) b += std::norm(c);
    b = std::sqrt(b);
    if (j + 1 == m || b < 1e-14) break;
    beta.push_back(b);
    for (std::size_t i = 0; i < n; ++i) w[i] /= b;
    basis.push_back(w);
  }

  const std::size_t mm = basis.size();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(mm, mm);
  for (std::size_t j = 0; j < mm; ++j) {
    t(j, j) = alpha[j];
    if (j + 1 < mm) t(j, j + 1) = t(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(mm);
  e1(0) = 1.0;
  Eigen::VectorXcd y = es.eigenvectors().transpose() * e1;
  for (std::size_t i = 0; i < mm; ++i)
    y(i) *= std::polar(1.0, -es.eigenvalues()(i) * dt);
  y = es.eigenvectors() * y;
  for (std::size_t i = 0; i < n; ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < mm; ++j) acc += basis[j][i] * y(j);
    psi[i] = nrm0 * acc;
  }
}

struct AdiabaticTerm {
  double path_coef = 0.0;
  double proj_coef = 0.0;  // already weighted; applied at `site`
  std::size_t site = 0;
};

// H(s) = -path_coef * A + proj_coef |site><site|.
AdiabaticTerm term_at(double s, double w, std::size_t entrance, std::size_t exit) {
  if (s <= 0) return {1.0 + s, s * w, entrance};
  return {1.0 - s, -s * w, exit};
}

}  // namespace

double StateVector::norm() const {
  double n2 = 0.0;
  for (const auto& c : amp) n2 += std::norm(c);
  return std::sqrt(n2);
}

double StateVector::probability(std::size_t site) const {
  return std::norm(amp[site]);
}

Propagator::Propagator(const spectral::CollapsedPath& p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(collapsed_dense(p));
  if (es.info() != Eigen::Success)
    fail(ErrorKind::NumericFailure, "dense eigensolver failed");
  dim_ = p.length();
  vecs_ = es.eigenvectors();
  vals_ = es.eigenvalues();
}

Propagator::Propagator(const MultiGraph& g) {
  if (g.vertex_count() > 2048)
    fail(ErrorKind::InstanceTooLarge,
         "dense walk limited to n <= 2048; use the step integrator");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(detail::dense_adjacency(g));
  if (es.info() != Eigen::Success)
    fail(ErrorKind::NumericFailure, "dense eigensolver failed");
  dim_ = g.vertex_count();
  vecs_ = es.eigenvectors();
  vals_ = es.eigenvalues();
}

StateVector Propagator::evolve_basis(std::size_t start, double t) const {
  StateVector out;
  out.time = t;
  out.amp.resize(dim_);
  Eigen::VectorXcd y(dim_);
  for (Eigen::Index i = 0; i < dim_; ++i)
    y(i) = vecs_(static_cast<Eigen::Index>(start), i) *
           std::polar(1.0, -vals_(i) * t);
  Eigen::VectorXcd psi = vecs_ * y;
  for (Eigen::Index i = 0; i < dim_; ++i) out.amp[i] = psi(i);
  return out;
}

std::complex<double> Propagator::transfer_amplitude(std::size_t start,
                                                    std::size_t target,
                                                    double t) const {
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < dim_; ++i)
    acc += vecs_(static_cast<Eigen::Index>(target), i) *
           vecs_(static_cast<Eigen::Index>(start), i) * std::polar(1.0, -vals_(i) * t);
  return acc;
}

StateVector ct_walk(const spectral::CollapsedPath& p, std::size_t start, double t) {
  if (t < 0) fail(ErrorKind::InvalidParameter, "time must be non-negative");
  return Propagator(p).evolve_basis(start, t);
}

StateVector ct_walk(const MultiGraph& g, std::size_t start, double t) {
  if (t < 0) fail(ErrorKind::InvalidParameter, "time must be non-negative");
  return Propagator(g).evolve_basis(start, t);
}

namespace {

ScanResult scan_with(const Propagator& prop, std::size_t start, std::size_t exit,
                     double t_max, std::uint32_t samples, bool parallel) {
  if (samples < 2) fail(ErrorKind::InvalidParameter, "need at least 2 samples");
  ScanResult res;
  res.curve.resize(samples);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(samples); ++i) {
    const double t = t_max * double(i) / double(samples - 1);
    const double prob = std::norm(prop.transfer_amplitude(start, exit, t));
    res.curve[i] = {t, prob};
  }
  for (const auto& [t, prob] : res.curve)
    if (prob > res.best_probability) {
      res.best_probability = prob;
      res.best_time = t;
    }
  return res;
}

}  // namespace

ScanResult exit_scan(const spectral::CollapsedPath& p, std::size_t start,
                     std::size_t exit, double t_max, std::uint32_t samples,
                     bool parallel) {
  return scan_with(Propagator(p), start, exit, t_max, samples, parallel);
}

ScanResult exit_scan(const MultiGraph& g, std::size_t start, std::size_t exit,
                     double t_max, std::uint32_t samples, bool parallel) {
  return scan_with(Propagator(g), start, exit, t_max, samples, parallel);
}

std::uint32_t default_steps(double total_time, double norm_scale) {
  const double s = 8.0 * total_time * std::max(1.0, norm_scale);
  return static_cast<std::uint32_t>(std::clamp(s, 2000.0, 4.0e6));
}

StateVector adiabatic_evolve(const spectral::CollapsedPath& p,
                             const Schedule& schedule, std::uint32_t steps,
                             double endpoint_weight) {
  if (steps < 2) fail(ErrorKind::InvalidParameter, "need at least 2 steps");
  const Eigen::Index n = p.length();
  const Eigen::MatrixXd a = collapsed_dense(p);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
  psi(0) = 1.0;
  const double dt = schedule.total_time / steps;
  for (std::uint32_t i = 0; i < steps; ++i) {
    const double s = schedule.s((i + 0.5) * dt);
    const auto term = term_at(s, endpoint_weight, 0, n - 1);
    Eigen::MatrixXd h = -term.path_coef * a;
    h(term.site, term.site) += term.proj_coef;
    step_exact(h, psi, dt);
  }
  StateVector out;
  out.time = schedule.total_time;
  out.amp.assign(psi.data(), psi.data() + n);
  if (std::abs(out.norm() - 1.0) > 1e-6)
    fail(ErrorKind::NumericFailure, "norm drift exceeded; increase step count");
  return out;
}

StateVector adiabatic_evolve(const MultiGraph& g, const InstanceLayout& layout,
                             const Schedule& schedule, std::uint32_t steps,
                             double endpoint_weight) {
  if (steps < 2) fail(ErrorKind::InvalidParameter, "need at least 2 steps");
  const std::size_t n = g.vertex_count();
  std::vector<Complex> psi(n, 0.0);
  psi[layout.entrance] = 1.0;
  const double dt = schedule.total_time / steps;
  const auto& off = g.offsets();
  const auto& adj = g.flat_adjacency();
  for (std::uint32_t i = 0; i < steps; ++i) {
    const double s = schedule.s((i + 0.5) * dt);
    const auto term = term_at(s, endpoint_weight, layout.entrance, layout.exit);
    auto apply = [&](const std::vector<Complex>& x, std::vector<Complex>& y) {
      const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
      for (std::int64_t v = 0; v < nn; ++v) {
        Complex acc = 0.0;
        for (std::uint64_t e = off[v]; e < off[v + 1]; ++e) acc += x[adj[e]];
        y[v] = -term.path_coef * acc;
      }
      y[term.site] += term.proj_coef * x[term.site];
    };
    step_krylov(apply, psi, dt, 24);
  }
  StateVector out;
  out.time = schedule.total_time;
  out.amp = std::move(psi);
  if (std::abs(out.norm() - 1.0) > 1e-6)
    fail(ErrorKind::NumericFailure, "norm drift exceeded; increase step count");
  return out;
}

}  // namespace twg::quantum
