#include <doctest.h>

#include <fstream>
#include <json.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "twg/build.hpp"
#include "twg/quantum.hpp"
#include "twg/spectral.hpp"

using namespace twg;
using namespace twg::quantum;

namespace {

// Independent test oracle: exp(-iAt) by scaling-and-squaring on a truncated
// Taylor series, no eigendecomposition involved.
Eigen::MatrixXcd expm_taylor(const Eigen::MatrixXd& a, double t) {
  using CMat = Eigen::MatrixXcd;
  CMat m = std::complex<double>(0.0, -t) * a.cast<std::complex<double>>();
  int squarings = 0;
  double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.5) {
    m *= 0.5;
    norm *= 0.5;
    ++squarings;
  }
  CMat result = CMat::Identity(a.rows(), a.cols());
  CMat term = result;
  for (int k = 1; k <= 24; ++k) {
    term = (term * m / double(k)).eval();
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = (result * result).eval();
  return result;
}

spectral::CollapsedPath uniform_path(std::uint32_t ell, double hop, double diag = 0.0) {
  spectral::CollapsedPath p;
  p.diag.assign(ell, diag);
  p.hop.assign(ell - 1, hop);
  return p;
}

Eigen::MatrixXd collapsed_matrix(const spectral::CollapsedPath& p) {
  const Eigen::Index n = p.length();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = p.diag[i];
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = p.hop[i];
  }
  return a;
}

}  // namespace

TEST_CASE("two-site transfer probability is sin^2(t)") {
  auto p = uniform_path(2, 1.0);
  for (double t : {0.0, 0.4, 1.1, 2.2, 3.0}) {
    auto st = ct_walk(p, 0, t);
    CHECK(st.probability(1) ==
          doctest::Approx(std::sin(t) * std::sin(t)).epsilon(1e-10));
    CHECK(st.norm() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("zero time leaves the start state untouched") {
  auto p = uniform_path(7, 2.5, 1.0);
  auto st = ct_walk(p, 3, 0.0);
  CHECK(st.probability(3) == doctest::Approx(1.0));
}

TEST_CASE("walk matches the independent expm oracle pointwise") {
  const double m = 3.0;
  auto p = uniform_path(5, m, 2.0 * m);
  const Eigen::MatrixXd a = collapsed_matrix(p);
  for (double t : {0.1, 0.5, 1.3, 2.7}) {
    const Eigen::MatrixXcd u = expm_taylor(a, t);
    auto st = ct_walk(p, 0, t);
    for (int j = 0; j < 5; ++j)
      CHECK(std::abs(st.amp[j] - u(j, 0)) <= 1e-8);
  }
}

TEST_CASE("full-graph walk equals the collapsed walk from the entrance") {
  BuildParams params;
  params.m = 8;
  params.k = 1;
  params.ell = 5;
  params.rounds = 0;
  params.expander_lambda2 = 8.0;
  params.seed = 51;
  auto [g, layout] = build_instance(params);
  auto collapsed = spectral::collapse_clusters(g, layout);
  Propagator full(g), small(collapsed);
  for (double t : {0.05, 0.12, 0.31, 0.5}) {
    const double p_full =
        std::norm(full.transfer_amplitude(layout.entrance, layout.exit, t));
    const double p_small = std::norm(small.transfer_amplitude(0, 4, t));
    CHECK(std::abs(p_full - p_small) <= 1e-4);
  }
}

TEST_CASE("exit_scan on two sites peaks at pi/2 with probability 1") {
  auto p = uniform_path(2, 1.0);
  auto res = exit_scan(p, 0, 1, 2.0, 4001);
  CHECK(res.best_probability >= 0.999);
  CHECK(std::abs(res.best_time - M_PI / 2.0) <= 2e-3);
}

TEST_CASE("exit_scan clears 0.5/ell^3 within 10*ell") {
  for (std::uint32_t ell : {5u, 21u}) {
    auto p = uniform_path(ell, 1.0);
    auto res = exit_scan(p, 0, ell - 1, 10.0 * ell, 1500);
    CHECK(res.best_probability >= 0.5 / std::pow(double(ell), 3.0));
  }
}

TEST_CASE("hop weight m rescales time exactly") {
  const std::uint32_t ell = 9;
  Propagator unit(uniform_path(ell, 1.0));
  Propagator scaled(uniform_path(ell, 4.0));
  for (double t : {0.3, 0.9, 2.0}) {
    const double p1 = std::norm(unit.transfer_amplitude(0, ell - 1, 4.0 * t));
    const double pm = std::norm(scaled.transfer_amplitude(0, ell - 1, t));
    CHECK(p1 == doctest::Approx(pm).epsilon(1e-9));
  }
}

TEST_CASE("adiabatic evolution on two sites converges to the exit") {
  auto p = uniform_path(2, 1.0);
  auto st = adiabatic_evolve(p, {200.0}, 8000, 1.0);
  CHECK(st.probability(1) >= 0.9);
  CHECK(std::abs(st.norm() - 1.0) <= 1e-6);
}

TEST_CASE("sudden quench leaves the walker at the entrance") {
  auto p = uniform_path(5, 1.0);
  auto st = adiabatic_evolve(p, {1e-3}, 100, 1.0);
  CHECK(st.probability(4) <= 0.01);
  CHECK(st.probability(0) >= 0.99);
}

TEST_CASE("exit probability is non-decreasing under doubling past the gap scale") {
  const double m = 16.0;
  spectral::CollapsedPath p;
  p.diag.assign(5, 2.0 * m);
  p.hop.assign(4, m);
  double prev = 0.0;
  for (double total : {8.0, 16.0, 32.0, 64.0}) {
    auto st = adiabatic_evolve(p, {total}, default_steps(total, 4.0 * m), m);
    CHECK(st.probability(4) >= prev - 1e-6);
    prev = st.probability(4);
  }
  CHECK(prev >= 0.99);
}

TEST_CASE("krylov graph stepper agrees with the dense collapsed stepper") {
  auto g = build_path(3);
  auto layout = plain_layout(g, 0, 2);
  auto p = uniform_path(3, 1.0);
  const double total = 30.0;
  const std::uint32_t steps = 3000;
  auto dense = adiabatic_evolve(p, {total}, steps, 1.0);
  auto sparse = adiabatic_evolve(g, layout, {total}, steps, 1.0);
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(std::norm(dense.amp[j]) - std::norm(sparse.amp[j])) <= 1e-6);
}

TEST_CASE("exit-scan peaks reproduce the committed calibration fixture") {
  std::ifstream is(std::string(TWG_FIXTURE_DIR) + "/calibration.json");
  REQUIRE(is.good());
  const auto fx = nlohmann::json::parse(is);
  for (const auto& pt : fx.at("exit_scan")) {
    const std::uint32_t ell = pt.at("ell");
    spectral::CollapsedPath p;
    p.diag.assign(ell, 0.0);
    p.hop.assign(ell - 1, 1.0);
    auto res = quantum::exit_scan(p, 0, ell - 1, pt.at("t_max"), pt.at("samples"));
    CHECK(res.best_probability ==
          doctest::Approx(pt.at("best_probability").get<double>()).epsilon(1e-9));
  }
}
