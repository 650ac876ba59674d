// twg: build obfuscated tunnel-graph instances, run classical query
// adversaries against the relabeled oracle, and verify the spectral and
// quantum-dynamics claims the construction rests on.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "twg/adversaries.hpp"
#include "twg/error.hpp"
#include "twg/experiments.hpp"
#include "twg/quantum.hpp"
#include "twg/serialize.hpp"
#include "twg/spectral.hpp"

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) twg::fail(twg::ErrorKind::ParseError, "cannot open " + path);
  return os;
}

twg::BuildParams params_from_cli(std::uint64_t m, std::uint32_t k, std::uint32_t ell,
                                 double delta, std::int64_t rounds,
                                 std::int64_t trees, std::vector<std::uint32_t> depths,
                                 double lambda2, std::uint64_t memory_cap,
                                 std::uint64_t seed) {
  twg::BuildParams p;
  p.m = m;
  p.k = k;
  p.ell = ell;
  p.delta = delta;
  if (rounds >= 0) p.rounds = static_cast<std::uint32_t>(rounds);
  if (trees >= 0) p.trees_per_vertex = static_cast<std::uint64_t>(trees);
  p.depth_override = std::move(depths);
  if (lambda2 > 0) p.expander_lambda2 = lambda2;
  p.memory_cap = memory_cap;
  p.seed = seed;
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"obfuscated tunnel-graph workbench"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_path;
  std::string config_path;
  app.add_option("--seed", seed, "master RNG seed")->capture_default_str();
  app.add_option("--out", out_path, "output file");
  app.add_option("--config", config_path, "JSON config file");

  // build
  auto* build = app.add_subcommand("build", "construct an instance and save it");
  build->fallthrough();
  std::uint64_t b_m = 4;
  std::uint32_t b_k = 1, b_ell = 5;
  double b_delta = 0.5, b_lambda2 = 0;
  std::int64_t b_rounds = -1, b_trees = -1;
  std::vector<std::uint32_t> b_depths;
  std::uint64_t b_cap = 20'000'000;
  std::string b_layout;
  build->add_option("--m", b_m, "branching scale")->capture_default_str();
  build->add_option("--k", b_k, "funnel depth")->capture_default_str();
  build->add_option("--ell", b_ell, "path length (odd)")->capture_default_str();
  build->add_option("--delta", b_delta, "decoration exponent")->capture_default_str();
  build->add_option("--rounds", b_rounds, "decoration rounds (-1 = m^delta)");
  build->add_option("--trees-per-vertex", b_trees, "trees per vertex (-1 = m^(1-delta))");
  build->add_option("--depths", b_depths, "per-level tree depth overrides");
  build->add_option("--expander-lambda2", b_lambda2,
                    "expander conditioning threshold (0 = default m)");
  build->add_option("--memory-cap", b_cap, "vertex cap")->capture_default_str();
  build->add_option("--layout", b_layout, "layout sidecar output path");

  // spectral
  auto* spectral = app.add_subcommand("spectral", "spectral verification outputs");
  spectral->fallthrough();
  auto* sweep = spectral->add_subcommand("sweep", "adiabatic gap sweep to CSV");
  sweep->fallthrough();
  std::uint64_t s_m = 16;
  std::uint32_t s_k = 1, s_ell = 5, s_grid = 201;
  double s_w = 0, s_lambda2 = 0;
  sweep->add_option("--m", s_m, "branching scale")->capture_default_str();
  sweep->add_option("--k", s_k, "funnel depth")->capture_default_str();
  sweep->add_option("--ell", s_ell, "path length")->capture_default_str();
  sweep->add_option("--s-grid", s_grid, "grid points")->capture_default_str();
  sweep->add_option("--endpoint-weight", s_w, "endpoint weight (0 = m)");
  sweep->add_option("--expander-lambda2", s_lambda2,
                    "expander conditioning threshold (0 = default m)");
  auto* quasi = spectral->add_subcommand("quasimomenta", "root dump to CSV");
  quasi->fallthrough();
  std::uint32_t q_ell = 21;
  double q_alpha = 0.0;
  quasi->add_option("--ell", q_ell, "path length")->capture_default_str();
  quasi->add_option("--alpha", q_alpha, "boundary weight")->capture_default_str();

  // adversary
  auto* adversary = app.add_subcommand("adversary", "classical query algorithms");
  adversary->fallthrough();
  auto* arun = adversary->add_subcommand("run", "run a trial suite from a config");
  arun->fallthrough();
  std::uint32_t a_label_bits = 0;
  arun->add_option("--label-bits", a_label_bits, "oracle label bits (0 = auto)");

  // quantum
  auto* quantum = app.add_subcommand("quantum", "quantum dynamics");
  quantum->fallthrough();
  auto* scan = quantum->add_subcommand("scan", "continuous-time walk exit scan");
  scan->fallthrough();
  std::uint32_t qs_ell = 21, qs_samples = 2000;
  double qs_tmax = 200.0, qs_hop = 1.0;
  scan->add_option("--ell", qs_ell, "collapsed path length")->capture_default_str();
  scan->add_option("--tmax", qs_tmax, "max evolution time")->capture_default_str();
  scan->add_option("--samples", qs_samples, "time samples")->capture_default_str();
  scan->add_option("--hop-weight", qs_hop, "uniform hop weight")->capture_default_str();

  // run / report
  auto* runcmd = app.add_subcommand("run", "full pipeline from a JSON config");
  runcmd->fallthrough();
  auto* report = app.add_subcommand("report", "summarize a result record");
  report->fallthrough();
  std::string rep_record;
  report->add_option("record", rep_record, "result record JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      auto params = params_from_cli(b_m, b_k, b_ell, b_delta, b_rounds, b_trees,
                                    b_depths, b_lambda2, b_cap, seed);
      auto [g, layout] = twg::build_instance(params);
      if (out_path.empty()) twg::fail(twg::ErrorKind::ParseError, "--out required");
      twg::save_graph_file(out_path, g, seed);
      if (!b_layout.empty()) twg::save_layout_file(b_layout, layout);
      std::cout << "built " << g.vertex_count() << " vertices, " << g.edge_count()
                << " edges, max degree " << g.max_degree() << "\n";
    } else if (sweep->parsed()) {
      twg::BuildParams params;
      params.m = s_m;
      params.k = s_k;
      params.ell = s_ell;
      params.rounds = 0;
      params.seed = seed;
      if (s_lambda2 > 0) params.expander_lambda2 = s_lambda2;
      twg::Rng rng(seed);
      auto [g, layout] = twg::obfuscate(params, rng);
      auto collapsed = twg::spectral::collapse_clusters(g, layout);
      const double w = s_w > 0 ? s_w : double(s_m);
      auto rows = twg::spectral::adiabatic_sweep(collapsed, s_grid, w);
      auto os = open_out(out_path.empty() ? "sweep.csv" : out_path);
      os << "s,lambda1,lambda2,gap\n";
      os.precision(15);
      for (const auto& r : rows)
        os << r.s << ',' << r.lambda1 << ',' << r.lambda2 << ',' << r.gap << '\n';
      std::cout << "wrote " << rows.size() << " grid points\n";
    } else if (quasi->parsed()) {
      auto sol = twg::spectral::solve_quasimomenta(q_ell, q_alpha);
      auto os = open_out(out_path.empty() ? "quasimomenta.csv" : out_path);
      os << "j,p,eigenvalue\n";
      os.precision(15);
      for (std::size_t i = 0; i < sol.trig_roots.size(); ++i)
        os << i + 1 << ',' << sol.trig_roots[i] << ',' << sol.eigenvalue(i) << '\n';
      if (sol.hyper_root)
        os << "hyper," << *sol.hyper_root << ','
           << sol.eigenvalue(sol.trig_roots.size()) << '\n';
      if (sol.boundary_pseudo)
        os << "pseudo,0," << sol.eigenvalue(sol.trig_roots.size()) << '\n';
      std::cout << "wrote " << sol.size() << " eigenvalues\n";
    } else if (arun->parsed()) {
      if (config_path.empty())
        twg::fail(twg::ErrorKind::ParseError, "--config required");
      auto cfg = twg::ExperimentConfig::from_file(config_path);
      if (cfg.adversaries.empty())
        twg::fail(twg::ErrorKind::ParseError, "config has no adversaries section");
      nlohmann::json out = nlohmann::json::array();
      for (std::size_t i = 0; i < cfg.adversaries.size(); ++i) {
        const auto& a = cfg.adversaries[i];
        twg::SuiteConfig sc;
        sc.instance = cfg.instance;
        sc.adversary = a.kind;
        sc.budget = a.budget;
        sc.trials = a.trials;
        sc.label_bits = a_label_bits ? a_label_bits : a.label_bits;
        sc.master_seed = twg::Rng(cfg.seed).split(0xADFull + i).next_u64();
        auto sj = twg::stats_to_json(twg::run_suite(sc));
        sj["kind"] = a.kind;
        out.push_back(sj);
      }
      auto os = open_out(out_path.empty() ? "adversary.json" : out_path);
      os << out.dump(2) << '\n';
      std::cout << "ran " << out.size() << " suites\n";
    } else if (scan->parsed()) {
      twg::spectral::CollapsedPath p;
      p.diag.assign(qs_ell, 0.0);
      p.hop.assign(qs_ell - 1, qs_hop);
      auto res = twg::quantum::exit_scan(p, 0, qs_ell - 1, qs_tmax, qs_samples);
      auto os = open_out(out_path.empty() ? "scan.csv" : out_path);
      os << "t,p_exit\n";
      os.precision(15);
      for (const auto& [t, prob] : res.curve) os << t << ',' << prob << '\n';
      std::cout << "best P=" << res.best_probability << " at t=" << res.best_time
                << "\n";
    } else if (runcmd->parsed()) {
      if (config_path.empty())
        twg::fail(twg::ErrorKind::ParseError, "--config required");
      auto cfg = twg::ExperimentConfig::from_file(config_path);
      auto rec = twg::run_experiment(cfg);
      auto os = open_out(out_path.empty() ? "record.json" : out_path);
      os << rec.dump() << '\n';
      const auto& errors = rec.payload.at("errors");
      if (!errors.empty()) {
        std::cerr << "stages failed: " << errors.dump() << "\n";
        const std::string text = errors.begin().value().get<std::string>();
        return text.find("converge") != std::string::npos ? 3 : 4;
      }
      std::cout << "record written, config hash "
                << rec.payload.at("config_hash").get<std::string>() << "\n";
    } else if (report->parsed()) {
      std::ifstream is(rep_record);
      if (!is) twg::fail(twg::ErrorKind::ParseError, "cannot open " + rep_record);
      nlohmann::json rec = nlohmann::json::parse(is);
      std::cout << "record " << rec.value("config_hash", std::string("?")) << " ("
                << rec.value("version", std::string("?")) << ")\n";
      if (rec.contains("instance")) {
        const auto& i = rec["instance"];
        std::cout << "  instance: " << i.value("vertices", 0) << " vertices, max degree "
                  << i.value("max_degree", 0)
                  << (i.value("forecast_match", false) ? " (forecast ok)" : "") << "\n";
      }
      if (rec.contains("adversaries"))
        for (const auto& a : rec["adversaries"])
          std::cout << "  " << a.value("kind", std::string("?")) << ": hit rate "
                    << a.value("hit_rate", 0.0) << " over " << a.value("trials", 0)
                    << " trials, median queries " << a.value("median_queries", 0)
                    << "\n";
      if (rec.contains("spectral"))
        std::cout << "  spectral: min gap " << rec["spectral"].value("min_gap", 0.0)
                  << "\n";
      if (rec.contains("quantum") && rec["quantum"].contains("scan"))
        std::cout << "  quantum scan: best P "
                  << rec["quantum"]["scan"].value("best_probability", 0.0) << "\n";
      if (rec.contains("quantum") && rec["quantum"].contains("adiabatic"))
        std::cout << "  adiabatic: P_exit "
                  << rec["quantum"]["adiabatic"].value("p_exit", 0.0) << "\n";
    }
  } catch (const twg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
