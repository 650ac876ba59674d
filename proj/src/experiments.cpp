#include "twg/experiments.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "twg/error.hpp"
#include "twg/quantum.hpp"
#include "twg/spectral.hpp"

namespace twg {

using nlohmann::json;

std::string version_string() { return "twg 1.0.0"; }

namespace {

double wall_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

BuildParams params_from_json(const json& j) {
  BuildParams p;
  p.m = j.at("m").get<std::uint64_t>();
  p.k = j.at("k").get<std::uint32_t>();
  p.ell = j.at("ell").get<std::uint32_t>();
  p.delta = j.value("delta", 0.5);
  if (j.contains("rounds")) p.rounds = j.at("rounds").get<std::uint32_t>();
  if (j.contains("trees_per_vertex"))
    p.trees_per_vertex = j.at("trees_per_vertex").get<std::uint64_t>();
  if (j.contains("depth_override"))
    p.depth_override = j.at("depth_override").get<std::vector<std::uint32_t>>();
  if (j.contains("arity_override"))
    p.arity_override = j.at("arity_override").get<std::vector<std::uint64_t>>();
  if (j.contains("expander_lambda2"))
    p.expander_lambda2 = j.at("expander_lambda2").get<double>();
  p.expander_max_attempts = j.value("expander_max_attempts", 1000u);
  p.memory_cap = j.value("memory_cap", std::uint64_t{20'000'000});
  return p;
}

json params_to_json(const BuildParams& p) {
  json j;
  j["m"] = p.m;
  j["k"] = p.k;
  j["ell"] = p.ell;
  j["delta"] = p.delta;
  if (p.rounds) j["rounds"] = *p.rounds;
  if (p.trees_per_vertex) j["trees_per_vertex"] = *p.trees_per_vertex;
  if (!p.depth_override.empty()) j["depth_override"] = p.depth_override;
  if (!p.arity_override.empty()) j["arity_override"] = p.arity_override;
  if (p.expander_lambda2) j["expander_lambda2"] = *p.expander_lambda2;
  j["expander_max_attempts"] = p.expander_max_attempts;
  j["memory_cap"] = p.memory_cap;
  return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("instance")) c.instance = params_from_json(j.at("instance"));
    c.instance.seed = c.seed;
    if (j.contains("adversaries"))
      for (const auto& a : j.at("adversaries")) {
        AdversarySection s;
        s.kind = a.value("kind", std::string("random_walk"));
        s.budget = a.at("budget").get<std::uint64_t>();
        s.trials = a.at("trials").get<std::uint32_t>();
        s.label_bits = a.value("label_bits", 0u);
        c.adversaries.push_back(s);
      }
    if (j.contains("spectral")) {
      SpectralSection s;
      const auto& sj = j.at("spectral");
      s.sweep_points = sj.value("sweep_points", 201u);
      if (sj.contains("endpoint_weight"))
        s.endpoint_weight = sj.at("endpoint_weight").get<double>();
      c.spectral = s;
    }
    if (j.contains("quantum")) {
      QuantumSection q;
      const auto& qj = j.at("quantum");
      if (qj.contains("scan")) {
        QuantumScanSection s;
        s.t_max = qj.at("scan").value("t_max", 50.0);
        s.samples = qj.at("scan").value("samples", 2000u);
        s.keep_curve = qj.at("scan").value("keep_curve", false);
        q.scan = s;
      }
      if (qj.contains("adiabatic")) {
        QuantumAdiabaticSection a;
        a.total_time = qj.at("adiabatic").value("total_time", 32.0);
        a.steps = qj.at("adiabatic").value("steps", 0u);
        q.adiabatic = a;
      }
      c.quantum = q;
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  return from_json(j);
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::ParseError, "cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json_text(ss.str());
}

json ExperimentConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["instance"] = params_to_json(instance);
  json advs = json::array();
  for (const auto& a : adversaries)
    advs.push_back({{"kind", a.kind},
                    {"budget", a.budget},
                    {"trials", a.trials},
                    {"label_bits", a.label_bits}});
  j["adversaries"] = advs;
  if (spectral) {
    json s;
    s["sweep_points"] = spectral->sweep_points;
    if (spectral->endpoint_weight) s["endpoint_weight"] = *spectral->endpoint_weight;
    j["spectral"] = s;
  }
  if (quantum) {
    json q;
    if (quantum->scan)
      q["scan"] = {{"t_max", quantum->scan->t_max},
                   {"samples", quantum->scan->samples},
                   {"keep_curve", quantum->scan->keep_curve}};
    if (quantum->adiabatic)
      q["adiabatic"] = {{"total_time", quantum->adiabatic->total_time},
                        {"steps", quantum->adiabatic->steps}};
    j["quantum"] = q;
  }
  return j;
}

std::string ExperimentConfig::hash() const {
  const std::string text = to_json().dump() + "|" + version_string();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::string ResultRecord::deterministic_dump() const {
  json copy = payload;
  copy.erase("timing_ms");
  return copy.dump(2);
}

json stats_to_json(const TrialStats& s) {
  json j;
  j["trials"] = s.trials;
  j["construction_failures"] = s.construction_failures;
  j["hits"] = s.hits;
  j["hit_rate"] = s.hit_rate;
  j["hit_ci"] = {s.hit_ci.lo, s.hit_ci.hi};
  j["events"] = {{"leaf_found", s.leaf_found},
                 {"tunnel_cycle_found", s.tunnel_cycle_found},
                 {"tunnel_traversed", s.tunnel_traversed}};
  j["total_queries"] = s.total_queries;
  j["mean_queries"] = s.mean_queries;
  j["median_queries"] = s.median_queries;
  j["query_hist_log2"] = s.query_hist_log2;
  return j;
}

ResultRecord run_experiment(const ExperimentConfig& config) {
  ResultRecord rec;
  json& out = rec.payload;
  out["config"] = config.to_json();
  out["config_hash"] = config.hash();
  out["version"] = version_string();
  out["errors"] = json::object();
  json timing = json::object();

  const auto t_start = std::chrono::steady_clock::now();
  std::optional<std::pair<MultiGraph, InstanceLayout>> inst;
  try {
    auto t0 = std::chrono::steady_clock::now();
    inst = build_instance(config.instance);
    const auto& g = inst->first;
    const auto fc = forecast_counts(config.instance);
    json ij;
    ij["vertices"] = g.vertex_count();
    ij["edges"] = g.edge_count();
    ij["max_degree"] = g.max_degree();
    std::ostringstream hx;
    hx << std::hex << g.hash();
    ij["graph_hash"] = hx.str();
    ij["forecast_vertices"] = fc.vertex_count;
    ij["forecast_max_degree"] = fc.max_degree;
    ij["forecast_match"] =
        !fc.saturated && fc.vertex_count == g.vertex_count() &&
        fc.max_degree == g.max_degree();
    out["instance"] = ij;
    timing["build"] = wall_ms(t0);
  } catch (const Error& e) {
    out["errors"]["build"] = e.what();
  }

  if (inst && !config.adversaries.empty()) {
    auto t0 = std::chrono::steady_clock::now();
    json advs = json::array();
    for (std::size_t i = 0; i < config.adversaries.size(); ++i) {
      const auto& a = config.adversaries[i];
      try {
        SuiteConfig sc;
        sc.instance = config.instance;
        sc.adversary = a.kind;
        sc.budget = a.budget;
        sc.trials = a.trials;
        sc.label_bits = a.label_bits;
        sc.master_seed = Rng(config.seed).split(0xADFull + i).next_u64();
        TrialStats stats = run_suite(sc);
        json sj = stats_to_json(stats);
        sj["kind"] = a.kind;
        sj["budget"] = a.budget;
        advs.push_back(sj);
      } catch (const Error& e) {
        out["errors"]["adversary_" + std::to_string(i)] = e.what();
      }
    }
    out["adversaries"] = advs;
    timing["adversaries"] = wall_ms(t0);
  }

  if (inst && config.spectral) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      const double w = config.spectral->endpoint_weight
                           ? *config.spectral->endpoint_weight
                           : double(config.instance.m);
      auto collapsed = spectral::collapse_clusters(inst->first, inst->second);
      auto sweep =
          spectral::adiabatic_sweep(collapsed, config.spectral->sweep_points, w);
      json rows = json::array();
      double min_gap = std::numeric_limits<double>::infinity();
      for (const auto& pt : sweep) {
        rows.push_back({pt.s, pt.lambda1, pt.lambda2, pt.gap});
        min_gap = std::min(min_gap, pt.gap);
      }
      json sj;
      sj["endpoint_weight"] = w;
      sj["sweep"] = rows;
      sj["min_gap"] = min_gap;
      sj["collapsed_top"] = spectral::top_eigenpair(collapsed).value;
      if (!inst->second.rounds_applied.empty()) {
        sj["decoration_norm"] = spectral::decoration_norm(inst->first, inst->second);
        auto pred = spectral::predict_decorated_eigenpair(
            inst->first, inst->second, std::numeric_limits<double>::infinity());
        sj["predicted_lambda"] = pred.lambda;
        sj["prediction_residual"] = pred.residual;
        auto wr = spectral::weight_report(pred.vector, inst->second);
        sj["weight_report"] = {{"l2_fraction_on_original", wr.l2_fraction_on_original},
                               {"l1_fraction_on_original", wr.l1_fraction_on_original}};
      }
      out["spectral"] = sj;
    } catch (const Error& e) {
      out["errors"]["spectral"] = e.what();
    }
    timing["spectral"] = wall_ms(t0);
  }

  if (inst && config.quantum) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      auto collapsed = spectral::collapse_clusters(inst->first, inst->second);
      json qj;
      if (config.quantum->scan) {
        const auto& sc = *config.quantum->scan;
        auto res = quantum::exit_scan(collapsed, 0, collapsed.length() - 1, sc.t_max,
                                      sc.samples);
        qj["scan"] = {{"t_max", sc.t_max},
                      {"samples", sc.samples},
                      {"best_time", res.best_time},
                      {"best_probability", res.best_probability}};
        if (sc.keep_curve) {
          json curve = json::array();
          for (const auto& [t, p] : res.curve) curve.push_back({t, p});
          qj["scan"]["curve"] = curve;
        }
      }
      if (config.quantum->adiabatic) {
        const auto& ad = *config.quantum->adiabatic;
        double norm_scale = 0.0;
        for (double d : collapsed.diag) norm_scale = std::max(norm_scale, d);
        for (double h : collapsed.hop) norm_scale = std::max(norm_scale, 2.0 * h);
        const std::uint32_t steps =
            ad.steps ? ad.steps : quantum::default_steps(ad.total_time, norm_scale);
        auto state = quantum::adiabatic_evolve(collapsed, {ad.total_time}, steps,
                                               config.spectral &&
                                                       config.spectral->endpoint_weight
                                                   ? *config.spectral->endpoint_weight
                                                   : double(config.instance.m));
        qj["adiabatic"] = {{"total_time", ad.total_time},
                           {"steps", steps},
                           {"p_exit", state.probability(collapsed.length() - 1)}};
      }
      out["quantum"] = qj;
    } catch (const Error& e) {
      out["errors"]["quantum"] = e.what();
    }
    timing["quantum"] = wall_ms(t0);
  }

  timing["total"] = wall_ms(t_start);
  out["timing_ms"] = timing;
  return rec;
}

}  // namespace twg
