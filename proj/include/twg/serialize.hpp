#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "twg/build.hpp"
#include "twg/multigraph.hpp"

namespace twg {

// Versioned text format:
//   TWG1 <vertex_count> <seed>
//   <index>: <neighbor indices, one per adjacency entry>
// Save/load round-trips bags bit-exactly, including entry order.
void save_graph(std::ostream& os, const MultiGraph& g, std::uint64_t seed);
void save_graph_file(const std::string& path, const MultiGraph& g, std::uint64_t seed);

struct LoadedGraph {
  MultiGraph graph;
  std::uint64_t seed = 0;
};
LoadedGraph load_graph(std::istream& is);
LoadedGraph load_graph_file(const std::string& path);

// Layout sidecar: JSON keyed by vertex index.
std::string layout_to_json(const InstanceLayout& layout);
InstanceLayout layout_from_json(const std::string& text);
void save_layout_file(const std::string& path, const InstanceLayout& layout);
InstanceLayout load_layout_file(const std::string& path);

}  // namespace twg
