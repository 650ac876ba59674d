#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twg/build.hpp"
#include "twg/oracle.hpp"
#include "twg/rng.hpp"

namespace twg {

// Ground-truth events (paper's exhaustive decomposition of EXIT discovery).
enum EventBit : std::uint8_t {
  kLeafFound = 1,
  kTunnelCycleFound = 2,
  kTunnelTraversed = 4,
};

struct TrialOutcome {
  bool found_exit = false;     // declared_exit or exit vertex seen in a response
  bool declared_exit = false;  // self-loop observed at a non-entrance vertex
  std::uint64_t queries = 0;
  std::uint64_t queries_to_exit = 0;  // query count when exit first appeared; 0 = never
  std::uint8_t events = 0;
  std::optional<std::uint32_t> deepest_cluster;
};

// Simple random walk from the entrance. Degrees are learned by sequential
// probing (each probe charged); every step charges one query at a uniformly
// random index. Stops on budget exhaustion or EXIT identification.
TrialOutcome random_walk_trial(LabeledOracle& o, const InstanceLayout& layout,
                               std::uint64_t budget, Rng& rng);

// Breadth-first exploration charging one query per (v,k) probe.
TrialOutcome bfs_trial(LabeledOracle& o, const InstanceLayout& layout,
                       std::uint64_t budget);

enum class ProbeResult { LeafHit, Survived, CycleHit };

// Uniformly random non-backtracking continuation of the edge from->via.
// Reports LeafHit if a degree-1 vertex is reached (or the walk gets stuck)
// within `depth` steps.
ProbeResult nonbacktracking_probe(LabeledOracle& o, Label from, Label via,
                                  std::uint32_t depth, Rng& rng);

// Ground-truth event classification of a transcript against the layout.
std::uint8_t classify(const QueryTranscript& t, const InstanceLayout& layout);

std::uint32_t auto_label_bits(const MultiGraph& g);

// --- statistics -----------------------------------------------------------

struct BinomialCI {
  double lo = 0.0, hi = 0.0;
};

// Normal approximation with continuity correction.
BinomialCI binomial_ci(std::uint64_t hits, std::uint64_t trials, double z = 1.959964);

// One-sided two-proportion test of H1: p_b < p_a (decoration lowers the hit
// rate). Returns the p-value.
double drop_pvalue(std::uint64_t hits_a, std::uint64_t n_a, std::uint64_t hits_b,
                   std::uint64_t n_b);

// --- suite ------------------------------------------------------------------

struct SuiteConfig {
  BuildParams instance;
  std::string adversary = "random_walk";  // "random_walk" | "bfs"
  std::uint64_t budget = 10000;
  std::uint32_t trials = 100;
  std::uint32_t label_bits = 0;  // 0 = derived from instance size
  std::uint64_t master_seed = 1;
  bool parallel = true;
  bool fresh_instance_per_trial = false;
};

struct TrialStats {
  std::uint32_t trials = 0;
  std::uint32_t construction_failures = 0;
  std::uint64_t hits = 0;
  double hit_rate = 0.0;
  BinomialCI hit_ci;
  std::uint64_t leaf_found = 0, tunnel_cycle_found = 0, tunnel_traversed = 0;
  std::uint64_t total_queries = 0;
  double mean_queries = 0.0;
  std::uint64_t median_queries = 0;
  std::vector<std::uint64_t> query_hist_log2;  // bucket i: queries in [2^i, 2^{i+1})
  std::vector<TrialOutcome> outcomes;          // per-trial, index = trial id
};

TrialStats run_suite(const SuiteConfig& config);

// Aggregation used by run_suite; exposed for tests and custom drivers.
TrialStats aggregate(std::vector<TrialOutcome> outcomes, std::uint32_t failures);

}  // namespace twg
