#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twg/adversaries.hpp"
#include "twg/build.hpp"

namespace twg {

struct SpectralSection {
  std::uint32_t sweep_points = 201;
  std::optional<double> endpoint_weight;  // default m
};

struct QuantumScanSection {
  double t_max = 50.0;
  std::uint32_t samples = 2000;
  bool keep_curve = false;
};

struct QuantumAdiabaticSection {
  double total_time = 32.0;
  std::uint32_t steps = 0;  // 0 = derived from T and the operator norm
};

struct QuantumSection {
  std::optional<QuantumScanSection> scan;
  std::optional<QuantumAdiabaticSection> adiabatic;
};

struct AdversarySection {
  std::string kind = "random_walk";
  std::uint64_t budget = 10000;
  std::uint32_t trials = 100;
  std::uint32_t label_bits = 0;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  BuildParams instance;
  std::vector<AdversarySection> adversaries;
  std::optional<SpectralSection> spectral;
  std::optional<QuantumSection> quantum;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::json to_json() const;

  // FNV-1a over the canonical config dump plus the code version.
  std::string hash() const;
};

struct ResultRecord {
  nlohmann::json payload;

  std::string dump(int indent = 2) const { return payload.dump(indent); }
  // Payload with the timing section removed; byte-identical across reruns of
  // the same config.
  std::string deterministic_dump() const;
};

// build -> oracle -> adversaries -> spectral -> quantum, with instance reuse.
// Stage failures are recorded under "errors" and do not abort independent
// stages.
ResultRecord run_experiment(const ExperimentConfig& config);

nlohmann::json stats_to_json(const TrialStats& stats);

std::string version_string();

}  // namespace twg
