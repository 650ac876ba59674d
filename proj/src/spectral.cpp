#include "twg/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dense_util.hpp"
#include "twg/error.hpp"
#include "twg/kernels.hpp"

namespace twg::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

double logsinh(double y) {
  // y > 0; stable for large arguments.
  if (y < 0.5) return std::log(std::sinh(y));
  return y + std::log1p(-std::exp(-2.0 * y)) - std::log(2.0);
}

// sinh((l+1)x)/sinh(l x) in the log domain.
double sinh_ratio(double x, std::uint32_t l) {
  return std::exp(logsinh((l + 1) * x) - logsinh(l * x));
}

// Unique x > 0 with sinh((l+1)x)/sinh(l x) = alpha, for alpha > (l+1)/l.
// The ratio is continuous, strictly increasing, with limit (l+1)/l at 0+.
double solve_sinh_ratio(std::uint32_t l, double alpha) {
  double hi = std::log(alpha) + 2.0;
  for (int i = 0; i < 200 && sinh_ratio(hi, l) <= alpha; ++i) hi *= 2.0;
  if (sinh_ratio(hi, l) <= alpha)
    fail(ErrorKind::NumericFailure, "hyperbolic quasimomentum bracket not found");
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-16 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0 || sinh_ratio(mid, l) < alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense_solve(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    fail(ErrorKind::NumericFailure, "dense eigensolver failed");
  return es;
}

Eigen::MatrixXd collapsed_dense(const CollapsedPath& p) {
  const Eigen::Index n = p.length();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = p.diag[i];
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = p.hop[i];
  }
  return a;
}

}  // namespace

double f_ell(double p, std::uint32_t ell, bool* pole) {
  const double s0 = std::sin(double(ell) * p);
  const double s1 = std::sin(double(ell + 1) * p);
  if (pole) *pole = false;
  if (std::abs(s0) < 1e-12) {
    if (pole) *pole = true;
    if (std::abs(s1) < 1e-12) return std::numeric_limits<double>::quiet_NaN();
    return std::copysign(std::numeric_limits<double>::infinity(), s1 / s0);
  }
  return s1 / s0;
}

std::size_t QuasimomentaSolution::size() const {
  return trig_roots.size() + (hyper_root ? 1 : 0) + (boundary_pseudo ? 1 : 0);
}

double QuasimomentaSolution::eigenvalue(std::size_t i) const {
  if (i < trig_roots.size()) return 2.0 * std::cos(trig_roots[i]);
  if (hyper_root) return hyper_sign * 2.0 * std::cosh(*hyper_root);
  return pseudo_sign * 2.0;
}

std::vector<double> QuasimomentaSolution::eigenvector(std::size_t i) const {
  std::vector<double> v(ell);
  if (i < trig_roots.size()) {
    const double p = trig_roots[i];
    for (std::uint32_t j = 1; j <= ell; ++j) v[j - 1] = std::sin(j * p);
  } else if (hyper_root) {
    // sinh(jx) normalized against the largest component to avoid overflow;
    // the mirrored branch (alpha < -(l+1)/l) alternates signs.
    const double x = *hyper_root;
    const double log_top = logsinh(double(ell) * x);
    for (std::uint32_t j = 1; j <= ell; ++j) {
      double a = std::exp(logsinh(double(j) * x) - log_top);
      if (hyper_sign < 0 && j % 2 == 0) a = -a;
      v[j - 1] = a;
    }
  } else {
    for (std::uint32_t j = 1; j <= ell; ++j)
      v[j - 1] = (pseudo_sign < 0 && j % 2 == 0) ? -double(j) : double(j);
  }
  double n2 = 0.0;
  for (double a : v) n2 += a * a;
  n2 = std::sqrt(n2);
  for (double& a : v) a /= n2;
  return v;
}

std::vector<double> QuasimomentaSolution::eigenvalues_sorted_desc() const {
  std::vector<double> ev(size());
  for (std::size_t i = 0; i < size(); ++i) ev[i] = eigenvalue(i);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

QuasimomentaSolution solve_quasimomenta(std::uint32_t ell, double alpha) {
  if (ell < 2) fail(ErrorKind::InvalidParameter, "quasimomenta need ell >= 2");
  QuasimomentaSolution sol;
  sol.alpha = alpha;
  sol.ell = ell;
  const double edge = double(ell + 1) / double(ell);
  const bool at_upper = std::abs(alpha - edge) <= 1e-14 * edge;
  const bool at_lower = std::abs(alpha + edge) <= 1e-14 * edge;

  for (std::uint32_t j = 1; j <= ell; ++j) {
    if (j == 1 && (alpha >= edge || at_upper)) continue;
    if (j == ell && (alpha <= -edge || at_lower)) continue;
    double lo = (j - 1) * kPi / ell;
    double hi = j * kPi / ell;
    // Sign-stable bracket function: (-1)^{j-1} (sin((l+1)p) - alpha sin(lp))
    // is positive at the left end and negative at the right end; sin(lp)
    // keeps one sign inside the interval.
    const double parity = (j % 2 == 1) ? 1.0 : -1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gmid =
          parity * (std::sin((ell + 1.0) * mid) - alpha * std::sin(double(ell) * mid));
      if (gmid > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    sol.trig_roots.push_back(0.5 * (lo + hi));
  }

  if (at_upper || at_lower) {
    sol.boundary_pseudo = true;
    sol.pseudo_sign = at_upper ? 1 : -1;
  } else if (alpha > edge) {
    sol.hyper_root = solve_sinh_ratio(ell, alpha);
    sol.hyper_sign = 1;
  } else if (alpha < -edge) {
    sol.hyper_root = solve_sinh_ratio(ell, -alpha);
    sol.hyper_sign = -1;
  }
  return sol;
}

PathGap path_gap(std::uint32_t ell, double alpha) {
  const auto sol = solve_quasimomenta(ell, alpha);
  const auto ev = sol.eigenvalues_sorted_desc();
  if (ev.size() < 2) fail(ErrorKind::NumericFailure, "need at least two eigenvalues");
  return {ev[0], ev[1], ev[0] - ev[1]};
}

double path_residual(std::uint32_t ell, double alpha, double lambda,
                     const std::vector<double>& v) {
  double r2 = 0.0, n2 = 0.0;
  for (std::uint32_t j = 0; j < ell; ++j) {
    double av = 0.0;
    if (j > 0) av += v[j - 1];
    if (j + 1 < ell) av += v[j + 1];
    if (j == ell - 1) av += alpha * v[j];
    const double r = av - lambda * v[j];
    r2 += r * r;
    n2 += v[j] * v[j];
  }
  return std::sqrt(r2 / n2);
}

CollapsedPath collapse_clusters(const MultiGraph& g, const InstanceLayout& layout) {
  const std::uint32_t ell = layout.ell;
  if (ell == 0) fail(ErrorKind::InvalidParameter, "layout has no clusters");
  std::vector<double> size(ell + 1, 0.0), internal(ell + 1, 0.0), cross(ell, 0.0);
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (layout.is_decoration(v)) continue;
    const std::uint32_t cv = layout.cluster[v];
    if (cv == 0 || cv > ell)
      fail(ErrorKind::InvalidParameter, "original vertex without cluster");
    size[cv] += 1.0;
    for (Vertex u : g.neighbors(v)) {
      if (layout.is_decoration(u)) continue;
      const std::uint32_t cu = layout.cluster[u];
      if (cu == cv) {
        internal[cv] += 1.0;  // loops once, internal edges twice (both bags)
      } else if (cu + 1 == cv || cv + 1 == cu) {
        cross[std::min(cu, cv)] += 1.0;
      } else {
        fail(ErrorKind::ConstructionFailed,
             "edge between non-adjacent clusters " + std::to_string(cv) + "," +
                 std::to_string(cu));
      }
    }
  }
  CollapsedPath p;
  p.diag.resize(ell);
  p.hop.resize(ell - 1);
  for (std::uint32_t j = 1; j <= ell; ++j) {
    if (size[j] == 0.0) fail(ErrorKind::ConstructionFailed, "empty cluster");
    p.diag[j - 1] = internal[j] / size[j];
    if (j < ell) p.hop[j - 1] = 0.5 * cross[j] / std::sqrt(size[j] * size[j + 1]);
  }
  return p;
}

EigenPair top_eigenpair(const MultiGraph& g, double tol, Vertex start) {
  auto r = kernels::power_top(g, double(g.max_degree()), tol, 100000, true, nullptr,
                              start);
  if (r.converged) return {r.value, std::move(r.vector), r.residual};
  if (g.vertex_count() <= 2048) {
    auto es = dense_solve(detail::dense_adjacency(g));
    const Eigen::Index n = g.vertex_count();
    EigenPair out;
    out.value = es.eigenvalues()(n - 1);
    out.vector.assign(es.eigenvectors().col(n - 1).data(),
                      es.eigenvectors().col(n - 1).data() + n);
    out.residual = 0.0;
    return out;
  }
  fail(ErrorKind::NumericFailure,
       "power iteration did not converge, residual " + std::to_string(r.residual));
}

EigenPair top_eigenpair(const CollapsedPath& p) {
  auto es = dense_solve(collapsed_dense(p));
  const Eigen::Index n = p.length();
  EigenPair out;
  out.value = es.eigenvalues()(n - 1);
  out.vector.assign(es.eigenvectors().col(n - 1).data(),
                    es.eigenvectors().col(n - 1).data() + n);
  return out;
}

double decoration_norm(const MultiGraph& g, const InstanceLayout& layout, double tol) {
  MultiGraphBuilder b(g.vertex_count());
  bool any = false;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    for (Vertex u : g.neighbors(v)) {
      if (u < v) continue;
      if (layout.is_decoration(u) || layout.is_decoration(v)) {
        b.add_edge(v, u);
        any = true;
      }
    }
  if (!any) return 0.0;
  MultiGraph ad = b.build();
  auto r = kernels::power_top(ad, double(ad.max_degree()), tol, 200000, true, nullptr,
                              ~Vertex{0});
  if (!r.converged)
    fail(ErrorKind::NumericFailure, "decoration norm estimate did not converge");
  return r.value;  // forests are bipartite: top eigenvalue equals the norm
}

double tree_top_eigenvalue(double gamma, const TreeSpec& tree,
                           std::optional<double>* x_out) {
  if (gamma < 0) fail(ErrorKind::InvalidParameter, "gamma must be non-negative");
  const double sb = std::sqrt(double(tree.arity));
  const std::uint32_t sites = tree.depth + 1;
  if (x_out) x_out->reset();
  if (gamma >= 2.0 * sb && sites >= 1) {
    const double alpha = gamma / sb;
    const double edge = double(sites + 1) / double(sites);
    if (std::abs(alpha - edge) <= 1e-14 * edge) return 2.0 * sb;
    const double x = solve_sinh_ratio(sites, alpha);
    if (x_out) *x_out = x;
    return 2.0 * sb * std::cosh(x);
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(sites, sites);
  a(0, 0) = gamma;
  for (std::uint32_t i = 0; i + 1 < sites; ++i) a(i, i + 1) = a(i + 1, i) = sb;
  return dense_solve(a).eigenvalues()(sites - 1);
}

FixedPoint decoration_fixed_point(double lambda_g, std::uint64_t k,
                                  const TreeSpec& tree) {
  if (lambda_g <= 0) fail(ErrorKind::InvalidParameter, "lambda_G must be positive");
  auto g_of = [&](double gamma) {
    return tree_top_eigenvalue(gamma, tree, nullptr) - lambda_g -
           (gamma > 0 ? double(k) / gamma : 0.0);
  };
  double lo, hi = lambda_g + double(k) + 2.0 * std::sqrt(double(tree.arity)) + 1.0;
  if (k == 0) {
    lo = 0.0;
    if (g_of(0.0) > 1e-12 * (1.0 + lambda_g))
      fail(ErrorKind::NumericFailure,
           "no bracketing interval: bare tree already exceeds lambda_G");
  } else {
    lo = 1e-9;
    for (int i = 0; i < 60 && g_of(lo) > 0.0; ++i) lo *= 0.5;
    if (g_of(lo) > 0.0)
      fail(ErrorKind::NumericFailure, "no bracketing interval for gamma");
  }
  if (g_of(hi) < 0.0) fail(ErrorKind::NumericFailure, "fixed-point bracket failed");
  for (int it = 0; it < 300 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g_of(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  FixedPoint fp;
  fp.gamma = 0.5 * (lo + hi);
  std::optional<double> x;
  fp.lambda_decorated = tree_top_eigenvalue(fp.gamma, tree, &x);
  fp.x = x;
  return fp;
}

PhiVector phi_vector(double gamma, const TreeSpec& tree) {
  if (gamma <= 0) fail(ErrorKind::InvalidParameter, "gamma must be positive");
  const double sb = std::sqrt(double(tree.arity));
  const std::uint32_t sites = tree.depth + 1;
  PhiVector phi;
  phi.level_amp.resize(sites);
  std::vector<double> log_amp(sites);

  const double alpha = gamma / sb;
  const double edge = double(sites + 1) / double(sites);
  if (gamma >= 2.0 * sb && alpha > edge * (1.0 + 1e-14)) {
    const double x = solve_sinh_ratio(sites, alpha);
    const double log_top = logsinh(double(sites) * x);
    for (std::uint32_t j = 0; j < sites; ++j) {
      log_amp[j] = logsinh(double(sites - j) * x) - log_top;
      phi.level_amp[j] = std::exp(log_amp[j]);
    }
  } else {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(sites, sites);
    a(0, 0) = gamma;
    for (std::uint32_t i = 0; i + 1 < sites; ++i) a(i, i + 1) = a(i + 1, i) = sb;
    auto es = dense_solve(a);
    Eigen::VectorXd u = es.eigenvectors().col(sites - 1);
    if (u(0) == 0.0) fail(ErrorKind::NumericFailure, "root amplitude vanished");
    for (std::uint32_t j = 0; j < sites; ++j) {
      phi.level_amp[j] = u(j) / u(0);
      if (phi.level_amp[j] <= 0.0)
        fail(ErrorKind::NumericFailure, "non-positive Perron amplitude");
      log_amp[j] = std::log(phi.level_amp[j]);
    }
  }

  double s2 = 0.0;
  for (double c : phi.level_amp) s2 += c * c;
  phi.l2 = std::sqrt(s2);

  // l1 over underlying vertices: sum_j c_j * b^{j/2}, in the log domain.
  const double logb = std::log(double(tree.arity));
  double mx = -std::numeric_limits<double>::infinity();
  for (std::uint32_t j = 0; j < sites; ++j)
    mx = std::max(mx, log_amp[j] + 0.5 * j * logb);
  double acc = 0.0;
  for (std::uint32_t j = 0; j < sites; ++j)
    acc += std::exp(log_amp[j] + 0.5 * j * logb - mx);
  phi.log_l1 = mx + std::log(acc);
  phi.l1 = std::exp(phi.log_l1);
  return phi;
}

Prediction predict_decorated_eigenpair(const MultiGraph& g,
                                       const InstanceLayout& layout, double tol) {
  const Vertex n = g.vertex_count();
  Vertex norig = 0;
  for (Vertex v = 0; v < n; ++v)
    if (!layout.is_decoration(v)) ++norig;
  for (Vertex v = 0; v < norig; ++v)
    if (layout.is_decoration(v))
      fail(ErrorKind::InvalidParameter,
           "layout does not keep original vertices as a prefix");

  // Base top eigenpair on the induced original subgraph.
  MultiGraphBuilder bb(norig);
  for (Vertex v = 0; v < norig; ++v)
    for (Vertex u : g.neighbors(v))
      if (u >= v && u < norig) bb.add_edge(v, u);
  MultiGraph base = bb.build();
  EigenPair base_pair;
  if (norig <= 2048) {
    auto es = dense_solve(detail::dense_adjacency(base));
    base_pair.value = es.eigenvalues()(norig - 1);
    base_pair.vector.assign(es.eigenvectors().col(norig - 1).data(),
                            es.eigenvectors().col(norig - 1).data() + norig);
  } else {
    base_pair = top_eigenpair(base, 1e-11, layout.entrance);
  }

  struct RoundData {
    double gamma;
    std::vector<double> scale;  // per tree depth: c_t * b^{-t/2}
  };
  std::map<std::uint16_t, RoundData> by_level;
  double lambda = base_pair.value;
  for (const auto& round : layout.rounds_applied) {
    FixedPoint fp = decoration_fixed_point(lambda, round.trees_per_vertex, round.tree);
    PhiVector phi = phi_vector(fp.gamma, round.tree);
    RoundData rd;
    rd.gamma = fp.gamma;
    rd.scale.resize(round.tree.depth + 1);
    for (std::uint32_t t = 0; t <= round.tree.depth; ++t)
      rd.scale[t] =
          phi.level_amp[t] * std::pow(double(round.tree.arity), -0.5 * double(t));
    by_level[static_cast<std::uint16_t>(round.level)] = std::move(rd);
    lambda = fp.lambda_decorated;
  }

  Prediction pred;
  pred.lambda = lambda;
  pred.vector.resize(n);
  for (Vertex v = 0; v < norig; ++v) pred.vector[v] = base_pair.vector[v];
  for (Vertex v = norig; v < n; ++v) {
    auto it = by_level.find(layout.level[v]);
    if (it == by_level.end())
      fail(ErrorKind::InvalidParameter, "decoration level missing from schedule");
    const RoundData& rd = it->second;
    pred.vector[v] =
        pred.vector[layout.attach[v]] / rd.gamma * rd.scale[layout.tree_depth[v]];
  }
  const double nv = kernels::norm2(pred.vector);
  for (double& a : pred.vector) a /= nv;

  std::vector<double> av(n);
  kernels::spmv(g, pred.vector, av, true);
  double r2 = 0.0;
  for (Vertex v = 0; v < n; ++v) {
    const double r = av[v] - pred.lambda * pred.vector[v];
    r2 += r * r;
  }
  pred.residual = std::sqrt(r2);
  if (pred.residual > tol)
    fail(ErrorKind::PredictionMismatch,
         "predicted eigenpair residual " + std::to_string(pred.residual) +
             " exceeds " + std::to_string(tol));
  return pred;
}

WeightReport weight_report(const std::vector<double>& vec,
                           const InstanceLayout& layout) {
  if (vec.size() != layout.kind.size())
    fail(ErrorKind::InvalidParameter, "vector/layout size mismatch");
  WeightReport rep;
  double l1_orig = 0.0, l2_orig = 0.0, l1_all = 0.0, l2_all = 0.0;
  std::map<std::uint16_t, double> l1_level, l2_level;
  for (std::size_t v = 0; v < vec.size(); ++v) {
    const double a = std::abs(vec[v]);
    l1_all += a;
    l2_all += a * a;
    if (!layout.is_decoration(static_cast<Vertex>(v))) {
      l1_orig += a;
      l2_orig += a * a;
    } else {
      l1_level[layout.level[v]] += a;
      l2_level[layout.level[v]] += a * a;
    }
  }
  if (l1_all == 0.0 || l2_all == 0.0)
    fail(ErrorKind::InvalidParameter, "zero vector");
  rep.l1_fraction_on_original = l1_orig / l1_all;
  rep.l2_fraction_on_original = l2_orig / l2_all;
  for (auto& [lvl, m] : l1_level) rep.l1_by_level[lvl] = m / l1_all;
  for (auto& [lvl, m] : l2_level) rep.l2_by_level[lvl] = m / l2_all;
  return rep;
}

namespace {

SpectrumPoint spectrum_of(Eigen::MatrixXd a, double s, double endpoint_weight,
                          Eigen::Index entrance, Eigen::Index exit) {
  const double path_coef = s <= 0 ? 1.0 + s : 1.0 - s;
  const double proj_coef = std::abs(s) * endpoint_weight;
  a *= path_coef;
  a(s <= 0 ? entrance : exit, s <= 0 ? entrance : exit) += proj_coef;
  auto es = dense_solve(a);
  const Eigen::Index n = a.rows();
  SpectrumPoint pt;
  pt.s = s;
  pt.lambda1 = es.eigenvalues()(n - 1);
  pt.lambda2 = n >= 2 ? es.eigenvalues()(n - 2) : 0.0;
  pt.gap = pt.lambda1 - pt.lambda2;
  return pt;
}

}  // namespace

SpectrumPoint adiabatic_spectrum(const CollapsedPath& p, double s,
                                 double endpoint_weight) {
  if (s < -1.0 || s > 1.0) fail(ErrorKind::InvalidParameter, "s must lie in [-1,1]");
  return spectrum_of(collapsed_dense(p), s, endpoint_weight, 0, p.length() - 1);
}

SpectrumPoint adiabatic_spectrum(const MultiGraph& g, const InstanceLayout& layout,
                                 double s, double endpoint_weight) {
  if (s < -1.0 || s > 1.0) fail(ErrorKind::InvalidParameter, "s must lie in [-1,1]");
  if (g.vertex_count() > 2048)
    fail(ErrorKind::InstanceTooLarge, "dense spectrum limited to n <= 2048");
  return spectrum_of(detail::dense_adjacency(g), s, endpoint_weight, layout.entrance,
                     layout.exit);
}

std::vector<SpectrumPoint> adiabatic_sweep(const CollapsedPath& p,
                                           std::uint32_t grid_points,
                                           double endpoint_weight, bool parallel) {
  if (grid_points < 2) fail(ErrorKind::InvalidParameter, "grid needs >= 2 points");
  std::vector<SpectrumPoint> out(grid_points);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(grid_points); ++i) {
    const double s = -1.0 + 2.0 * double(i) / double(grid_points - 1);
    out[i] = adiabatic_spectrum(p, s, endpoint_weight);
  }
  return out;
}

}  // namespace twg::spectral
