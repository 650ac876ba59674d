#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "twg/build.hpp"
#include "twg/error.hpp"
#include "twg/experiments.hpp"
#include "twg/quantum.hpp"
#include "twg/serialize.hpp"
#include "twg/spectral.hpp"

using namespace twg;

namespace {

double desk_lambda2(std::uint64_t m) {
  return 2.0 * std::sqrt(2.0 * double(m) - 1.0) + 0.3;
}

BuildParams tiny_params(std::uint64_t seed) {
  BuildParams p;
  p.m = 2;
  p.k = 1;
  p.ell = 5;
  p.rounds = 1;
  p.trees_per_vertex = 1;
  p.depth_override = {1};
  p.arity_override = {2};
  p.expander_lambda2 = desk_lambda2(2);
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("graph save/load round-trips bit-exactly") {
  auto [g, layout] = build_instance(tiny_params(3));
  std::ostringstream os;
  save_graph(os, g, 3);
  const std::string first = os.str();

  std::istringstream is(first);
  auto loaded = load_graph(is);
  CHECK(loaded.seed == 3);
  CHECK(loaded.graph.hash() == g.hash());

  std::ostringstream os2;
  save_graph(os2, loaded.graph, loaded.seed);
  CHECK(os2.str() == first);
}

TEST_CASE("loader reports the offending line") {
  auto g = build_path(4);
  std::ostringstream os;
  save_graph(os, g, 9);
  std::string text = os.str();
  text = text.substr(0, text.find("2:"));  // truncate at vertex 2's line
  std::istringstream is(text);
  try {
    load_graph(is);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }

  std::istringstream bad_header("BOGUS 3 1\n");
  CHECK_THROWS_AS(load_graph(bad_header), Error);

  std::istringstream bad_neighbor("TWG1 2 1\n0: 5\n1: 0\n");
  CHECK_THROWS_AS(load_graph(bad_neighbor), Error);
}

TEST_CASE("loaded instances match the forecast") {
  auto params = tiny_params(7);
  auto [g, layout] = build_instance(params);
  std::ostringstream os;
  save_graph(os, g, params.seed);
  std::istringstream is(os.str());
  auto loaded = load_graph(is);
  auto fc = forecast_counts(params);
  CHECK(loaded.graph.vertex_count() == fc.vertex_count);
  CHECK(loaded.graph.max_degree() == fc.max_degree);
}

TEST_CASE("layout sidecar round-trips through JSON") {
  auto [g, layout] = build_instance(tiny_params(11));
  auto text = layout_to_json(layout);
  auto back = layout_from_json(text);
  CHECK(back.kind == layout.kind);
  CHECK(back.cluster == layout.cluster);
  CHECK(back.level == layout.level);
  CHECK(back.attach == layout.attach);
  CHECK(back.tree_depth == layout.tree_depth);
  CHECK(back.flags == layout.flags);
  CHECK(back.entrance == layout.entrance);
  CHECK(back.exit == layout.exit);
  CHECK(back.rounds_applied.size() == layout.rounds_applied.size());
}

TEST_CASE("experiment config parses, hashes stably, and rejects junk") {
  const std::string text = R"({
    "seed": 5,
    "instance": {"m": 2, "k": 1, "ell": 5, "rounds": 0, "expander_lambda2": 3.8},
    "adversaries": [{"kind": "random_walk", "budget": 200, "trials": 10}],
    "spectral": {"sweep_points": 21},
    "quantum": {"scan": {"t_max": 5.0, "samples": 50}}
  })";
  auto cfg = ExperimentConfig::from_json_text(text);
  CHECK(cfg.seed == 5);
  CHECK(cfg.instance.m == 2);
  CHECK(cfg.adversaries.size() == 1);
  CHECK(cfg.spectral.has_value());
  CHECK(cfg.hash() == ExperimentConfig::from_json_text(text).hash());

  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{nope"), Error);
  CHECK_THROWS_AS(
      ExperimentConfig::from_json_text(R"({"adversaries": [{"kind": "x"}]})"), Error);
}

TEST_CASE("empty config sections yield a record with empty fields") {
  ExperimentConfig cfg;
  cfg.seed = 2;
  cfg.instance = tiny_params(2);
  auto rec = run_experiment(cfg);
  CHECK(rec.payload.contains("instance"));
  CHECK_FALSE(rec.payload.contains("adversaries"));
  CHECK_FALSE(rec.payload.contains("spectral"));
  CHECK_FALSE(rec.payload.contains("quantum"));
  CHECK(rec.payload.at("errors").empty());
}

TEST_CASE("identical configs reproduce every non-timing byte") {
  ExperimentConfig cfg;
  cfg.seed = 13;
  cfg.instance = tiny_params(13);
  AdversarySection adv;
  adv.kind = "random_walk";
  adv.budget = 300;
  adv.trials = 25;
  cfg.adversaries = {adv};
  SpectralSection sp;
  sp.sweep_points = 31;
  cfg.spectral = sp;
  QuantumSection q;
  q.scan = QuantumScanSection{10.0, 101, false};
  q.adiabatic = QuantumAdiabaticSection{8.0, 4000};
  cfg.quantum = q;

  auto r1 = run_experiment(cfg);
  auto r2 = run_experiment(cfg);
  CHECK(r1.deterministic_dump() == r2.deterministic_dump());
  CHECK(r1.payload.at("errors").empty());
  CHECK(r1.payload.at("instance").at("forecast_match").get<bool>());
}

TEST_CASE("a failing adversary stage does not corrupt the spectral stage") {
  ExperimentConfig cfg;
  cfg.seed = 4;
  cfg.instance = tiny_params(4);
  AdversarySection bogus;
  bogus.kind = "oracle_psychic";
  bogus.budget = 10;
  bogus.trials = 2;
  cfg.adversaries = {bogus};
  SpectralSection sp;
  sp.sweep_points = 11;
  cfg.spectral = sp;
  auto rec = run_experiment(cfg);
  CHECK(rec.payload.at("errors").contains("adversary_0"));
  CHECK(rec.payload.contains("spectral"));
  CHECK(rec.payload.at("spectral").at("min_gap").get<double>() > 0.0);
}

TEST_CASE("separation preset: classical drop dwarfs the quantum shift") {
  // Matched m=4 instances, r=0 vs r=1 with a minimal (2,1) decoration; the
  // adiabatic exit probability moves by less than the classical hit-rate
  // drop on the same pair.
  BuildParams base;
  base.m = 4;
  base.k = 1;
  base.ell = 5;
  base.rounds = 0;
  base.expander_lambda2 = desk_lambda2(4);
  base.seed = 77;
  BuildParams dec = base;
  dec.rounds = 1;
  dec.trees_per_vertex = 1;
  dec.depth_override = {1};
  dec.arity_override = {2};

  auto [g0, l0] = build_instance(base);
  auto [g1, l1] = build_instance(dec);

  const double total = 24.0;
  const double w = double(base.m);
  auto s0 = quantum::adiabatic_evolve(g0, l0, {total},
                                      quantum::default_steps(total, 16.0), w);
  auto s1 = quantum::adiabatic_evolve(g1, l1, {total},
                                      quantum::default_steps(total, 16.0), w);
  const double quantum_shift =
      std::abs(s0.probability(l0.exit) - s1.probability(l1.exit));
  CHECK(s0.probability(l0.exit) >= 0.9);
  CHECK(s1.probability(l1.exit) >= 0.9);

  SuiteConfig sc;
  sc.instance = base;
  sc.adversary = "random_walk";
  sc.budget = 400;
  sc.trials = 300;
  sc.master_seed = 9;
  auto c0 = run_suite(sc);
  sc.instance = dec;
  auto c1 = run_suite(sc);
  const double classical_drop = c0.hit_rate - c1.hit_rate;
  MESSAGE("quantum shift ", quantum_shift, ", classical drop ", classical_drop);
  CHECK(classical_drop > 0.0);
  CHECK(quantum_shift < classical_drop);
}

namespace {

// Integers and strings must match exactly; floating values to 1e-6 relative
// (keeps the fixture portable across libm builds).
void check_json_close(const nlohmann::json& a, const nlohmann::json& b,
                      const std::string& path) {
  INFO("at ", path);
  REQUIRE(a.type() == b.type());
  if (a.is_object()) {
    REQUIRE(a.size() == b.size());
    for (auto it = a.begin(); it != a.end(); ++it)
      check_json_close(it.value(), b.at(it.key()), path + "/" + it.key());
  } else if (a.is_array()) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      check_json_close(a[i], b[i], path + "[" + std::to_string(i) + "]");
  } else if (a.is_number_float()) {
    const double x = a.get<double>(), y = b.get<double>();
    CHECK(std::abs(x - y) <= 1e-6 * (1.0 + std::max(std::abs(x), std::abs(y))));
  } else {
    CHECK(a == b);
  }
}

}  // namespace

TEST_CASE("the committed golden record reproduces from its config") {
  std::ifstream cfg_is(std::string(TWG_FIXTURE_DIR) + "/golden_config.json");
  REQUIRE(cfg_is.good());
  std::stringstream cfg_ss;
  cfg_ss << cfg_is.rdbuf();
  auto cfg = ExperimentConfig::from_json_text(cfg_ss.str());

  std::ifstream rec_is(std::string(TWG_FIXTURE_DIR) + "/golden_record.json");
  REQUIRE(rec_is.good());
  const auto expect = nlohmann::json::parse(rec_is);

  auto rec = run_experiment(cfg);
  auto got = nlohmann::json::parse(rec.deterministic_dump());
  check_json_close(got, expect, "");
}
