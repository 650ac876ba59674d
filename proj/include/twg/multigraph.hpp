#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace twg {

using Vertex = std::uint32_t;

// Undirected multigraph with self-loops, stored as CSR adjacency bags.
// A non-loop edge {u,v} contributes one entry to each endpoint's bag; a
// self-loop contributes a single entry listing the vertex itself (so the
// adjacency-matrix diagonal equals the loop count). Immutable once built.
class MultiGraph {
 public:
  MultiGraph() = default;

  Vertex vertex_count() const { return n_; }
  std::uint64_t entry_count() const { return adj_.size(); }

  std::uint64_t degree(Vertex v) const { return off_[v + 1] - off_[v]; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adj_.data() + off_[v], adj_.data() + off_[v + 1]};
  }

  std::uint64_t loop_count(Vertex v) const {
    std::uint64_t c = 0;
    for (Vertex u : neighbors(v))
      if (u == v) ++c;
    return c;
  }

  std::uint64_t max_degree() const {
    std::uint64_t d = 0;
    for (Vertex v = 0; v < n_; ++v) d = std::max(d, degree(v));
    return d;
  }

  // Total edge count: loops count once, parallel edges per multiplicity.
  std::uint64_t edge_count() const;

  bool is_symmetric() const;

  // FNV-1a over the CSR arrays; equal seeds must yield equal hashes.
  std::uint64_t hash() const;

  // Adopts per-vertex bags verbatim (deserialization); caller is responsible
  // for symmetry.
  static MultiGraph from_bags(const std::vector<std::vector<Vertex>>& bags);

  const std::vector<std::uint64_t>& offsets() const { return off_; }
  const std::vector<Vertex>& flat_adjacency() const { return adj_; }

 private:
  friend class MultiGraphBuilder;
  Vertex n_ = 0;
  std::vector<std::uint64_t> off_;  // n+1
  std::vector<Vertex> adj_;
};

// Accumulates edges, then lays out CSR bags. Bag order is the edge insertion
// order, which keeps builds bit-reproducible for a fixed seed.
class MultiGraphBuilder {
 public:
  explicit MultiGraphBuilder(Vertex n) : n_(n) {}

  void add_edge(Vertex u, Vertex v) { edges_.emplace_back(u, v); }
  void add_loop(Vertex v) { edges_.emplace_back(v, v); }
  void reserve(std::size_t edges) { edges_.reserve(edges); }

  Vertex vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }

  MultiGraph build() const;

 private:
  Vertex n_;
  std::vector<std::pair<Vertex, Vertex>> edges_;
};

}  // namespace twg
