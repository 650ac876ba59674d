#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twg/multigraph.hpp"
#include "twg/rng.hpp"

namespace twg {

// Complete b-ary tree: every non-bottom vertex has exactly `arity` children,
// all leaves at depth `depth`.
struct TreeSpec {
  std::uint64_t arity = 1;
  std::uint32_t depth = 0;

  // (b^{D+1}-1)/(b-1); saturates at UINT64_MAX on overflow.
  std::uint64_t vertex_count() const;
};

// One decoration application: attach `trees_per_vertex` copies of `tree` to
// every vertex of the current graph, root linked by a single edge.
struct RoundSpec {
  std::uint32_t level = 1;
  std::uint64_t trees_per_vertex = 1;
  TreeSpec tree;
};

enum class VertexKind : std::uint8_t {
  Entrance = 0,
  Exit = 1,
  Funnel = 2,
  Tunnel = 3,
  Decoration = 4,
};

struct InstanceLayout {
  std::vector<VertexKind> kind;
  std::vector<std::uint32_t> cluster;     // 1-based path position; 0 = none
  std::vector<std::uint16_t> level;       // decoration level; 0 = original
  std::vector<Vertex> attach;             // vertex the decoration tree hangs from
  std::vector<std::uint16_t> tree_depth;  // depth within the attached tree
  std::vector<std::uint8_t> flags;

  static constexpr std::uint8_t kTreeRoot = 1;
  static constexpr std::uint8_t kTreeLeaf = 2;
  static constexpr std::uint8_t kTopLevelLeaf = 4;

  Vertex entrance = 0;
  Vertex exit = 0;
  std::uint32_t ell = 0;
  std::uint32_t funnel_k = 0;
  std::vector<RoundSpec> rounds_applied;  // in application order (level r..1)

  bool is_decoration(Vertex v) const { return kind[v] == VertexKind::Decoration; }
  bool is_tunnel(Vertex v) const { return kind[v] == VertexKind::Tunnel; }
  bool has_flag(Vertex v, std::uint8_t f) const { return (flags[v] & f) != 0; }

  void resize_original(Vertex n);
};

struct BuildParams {
  std::uint64_t m = 2;       // branching scale
  std::uint32_t k = 1;       // funnel depth
  std::uint32_t ell = 5;     // path length, odd, >= 2k+1
  double delta = 0.5;        // decoration exponent

  // Desk-scale overrides; defaults follow the m^delta / m^{1-delta} choices.
  std::optional<std::uint32_t> rounds;
  std::optional<std::uint64_t> trees_per_vertex;
  std::vector<std::uint32_t> depth_override;  // depth for level j at index j-1
  std::vector<std::uint64_t> arity_override;  // arity for level j at index j-1

  std::optional<double> expander_lambda2;  // conditioning threshold; default m
  std::uint32_t expander_max_attempts = 1000;
  std::uint64_t memory_cap = 20'000'000;
  std::uint64_t seed = 1;

  std::uint32_t effective_rounds() const;
  std::uint64_t effective_trees_per_vertex() const;
  double effective_lambda2() const;

  // Decoration schedule in application order: level r first, then r-1, ... 1.
  // Level-j arity is 5m-(j-1)h-1, depth ceil(j*m^{3*delta}) unless overridden.
  std::vector<RoundSpec> schedule() const;

  void validate() const;
};

struct ForecastCounts {
  std::uint64_t vertex_count = 0;
  std::uint64_t max_degree = 0;
  std::uint64_t entrance = 0, exit = 0, funnel = 0, tunnel = 0, decoration = 0;
  bool saturated = false;  // some count overflowed uint64
};

MultiGraph build_path(std::uint32_t ell);

// Rooted at vertex 0, children laid out level by level.
MultiGraph build_complete_tree(const TreeSpec& spec);

std::pair<MultiGraph, InstanceLayout> obfuscate(const BuildParams& params, Rng& rng);

// Applies the given rounds in order to (g, layout); original vertices keep
// their ids and adjacency (induced subgraph).
std::pair<MultiGraph, InstanceLayout> decorate(const MultiGraph& g,
                                               const InstanceLayout& layout,
                                               const std::vector<RoundSpec>& schedule,
                                               std::uint64_t memory_cap);

std::pair<MultiGraph, InstanceLayout> decorate(const MultiGraph& g,
                                               const InstanceLayout& layout,
                                               const BuildParams& params);

ForecastCounts forecast_counts(const BuildParams& params);

// Cluster size m^{2*min(j-1, ell-j)} capped at m^{2k}; 1-based j.
std::uint64_t cluster_size(const BuildParams& params, std::uint32_t j);

// Layout for a graph with no obfuscation structure (bare paths, test bases):
// vertex 0 is the entrance, `exit` the target; every vertex cluster-less.
InstanceLayout plain_layout(const MultiGraph& g, Vertex entrance, Vertex exit);

std::pair<MultiGraph, InstanceLayout> build_instance(const BuildParams& params);

}  // namespace twg
