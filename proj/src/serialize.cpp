#include "twg/serialize.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "twg/error.hpp"

namespace twg {

using nlohmann::json;

void save_graph(std::ostream& os, const MultiGraph& g, std::uint64_t seed) {
  os << "TWG1 " << g.vertex_count() << ' ' << seed << '\n';
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    os << v << ':';
    for (Vertex u : g.neighbors(v)) os << ' ' << u;
    os << '\n';
  }
}

void save_graph_file(const std::string& path, const MultiGraph& g, std::uint64_t seed) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::ParseError, "cannot open " + path + " for writing");
  save_graph(os, g, seed);
}

LoadedGraph load_graph(std::istream& is) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line))
    fail(ErrorKind::ParseError, "line 1: empty input, expected TWG1 header");
  std::istringstream hdr(line);
  std::string magic;
  std::uint64_t n = 0, seed = 0;
  if (!(hdr >> magic >> n >> seed) || magic != "TWG1")
    fail(ErrorKind::ParseError, "line 1: malformed header, expected 'TWG1 <n> <seed>'");
  if (n > 0xffffffffull) fail(ErrorKind::ParseError, "line 1: vertex count out of range");

  std::vector<std::vector<Vertex>> bags(n);
  for (std::uint64_t v = 0; v < n; ++v) {
    ++lineno;
    if (!std::getline(is, line))
      fail(ErrorKind::ParseError,
           "line " + std::to_string(lineno) + ": truncated file, expected vertex " +
               std::to_string(v));
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head) || head != std::to_string(v) + ":")
      fail(ErrorKind::ParseError,
           "line " + std::to_string(lineno) + ": expected '" + std::to_string(v) + ":'");
    std::uint64_t u;
    while (ls >> u) {
      if (u >= n)
        fail(ErrorKind::ParseError,
             "line " + std::to_string(lineno) + ": neighbor index out of range");
      bags[v].push_back(static_cast<Vertex>(u));
    }
    if (!ls.eof())
      fail(ErrorKind::ParseError,
           "line " + std::to_string(lineno) + ": trailing garbage");
  }
  LoadedGraph out{MultiGraph::from_bags(bags), seed};
  if (!out.graph.is_symmetric())
    fail(ErrorKind::ParseError, "adjacency bags are not symmetric");
  return out;
}

LoadedGraph load_graph_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::ParseError, "cannot open " + path);
  return load_graph(is);
}

namespace {

const char* kind_name(VertexKind k) {
  switch (k) {
    case VertexKind::Entrance: return "entrance";
    case VertexKind::Exit: return "exit";
    case VertexKind::Funnel: return "funnel";
    case VertexKind::Tunnel: return "tunnel";
    default: return "decoration";
  }
}

VertexKind kind_from(const std::string& s) {
  if (s == "entrance") return VertexKind::Entrance;
  if (s == "exit") return VertexKind::Exit;
  if (s == "funnel") return VertexKind::Funnel;
  if (s == "tunnel") return VertexKind::Tunnel;
  if (s == "decoration") return VertexKind::Decoration;
  fail(ErrorKind::ParseError, "unknown vertex kind '" + s + "'");
}

}  // namespace

std::string layout_to_json(const InstanceLayout& layout) {
  json j;
  j["version"] = 1;
  j["entrance"] = layout.entrance;
  j["exit"] = layout.exit;
  j["ell"] = layout.ell;
  j["k"] = layout.funnel_k;
  json rounds = json::array();
  for (const auto& r : layout.rounds_applied)
    rounds.push_back({{"level", r.level},
                      {"trees_per_vertex", r.trees_per_vertex},
                      {"arity", r.tree.arity},
                      {"depth", r.tree.depth}});
  j["rounds"] = rounds;
  json verts;
  for (std::size_t v = 0; v < layout.kind.size(); ++v) {
    json e;
    e["kind"] = kind_name(layout.kind[v]);
    e["cluster"] = layout.cluster[v];
    if (layout.kind[v] == VertexKind::Decoration) {
      e["level"] = layout.level[v];
      e["attach"] = layout.attach[v];
      e["depth"] = layout.tree_depth[v];
      e["flags"] = layout.flags[v];
    }
    verts[std::to_string(v)] = std::move(e);
  }
  j["vertices"] = std::move(verts);
  return j.dump();
}

InstanceLayout layout_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::ParseError, std::string("layout JSON: ") + e.what());
  }
  InstanceLayout layout;
  const auto& verts = j.at("vertices");
  layout.resize_original(static_cast<Vertex>(verts.size()));
  layout.entrance = j.at("entrance").get<Vertex>();
  layout.exit = j.at("exit").get<Vertex>();
  layout.ell = j.at("ell").get<std::uint32_t>();
  layout.funnel_k = j.at("k").get<std::uint32_t>();
  for (const auto& r : j.at("rounds")) {
    RoundSpec spec;
    spec.level = r.at("level").get<std::uint32_t>();
    spec.trees_per_vertex = r.at("trees_per_vertex").get<std::uint64_t>();
    spec.tree.arity = r.at("arity").get<std::uint64_t>();
    spec.tree.depth = r.at("depth").get<std::uint32_t>();
    layout.rounds_applied.push_back(spec);
  }
  for (auto it = verts.begin(); it != verts.end(); ++it) {
    const Vertex v = static_cast<Vertex>(std::stoul(it.key()));
    if (v >= layout.kind.size())
      fail(ErrorKind::ParseError, "layout vertex index out of range: " + it.key());
    const auto& e = it.value();
    layout.kind[v] = kind_from(e.at("kind").get<std::string>());
    layout.cluster[v] = e.at("cluster").get<std::uint32_t>();
    if (layout.kind[v] == VertexKind::Decoration) {
      layout.level[v] = e.at("level").get<std::uint16_t>();
      layout.attach[v] = e.at("attach").get<Vertex>();
      layout.tree_depth[v] = e.at("depth").get<std::uint16_t>();
      layout.flags[v] = e.at("flags").get<std::uint8_t>();
    }
  }
  return layout;
}

void save_layout_file(const std::string& path, const InstanceLayout& layout) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::ParseError, "cannot open " + path + " for writing");
  os << layout_to_json(layout);
}

InstanceLayout load_layout_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return layout_from_json(ss.str());
}

}  // namespace twg
