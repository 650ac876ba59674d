#include "twg/multigraph.hpp"

#include <algorithm>

#include "twg/error.hpp"

namespace twg {

std::uint64_t MultiGraph::edge_count() const {
  std::uint64_t loops = 0;
  for (Vertex v = 0; v < n_; ++v) loops += loop_count(v);
  return (adj_.size() - loops) / 2 + loops;
}

bool MultiGraph::is_symmetric() const {
  // Multiset equality of directed entries with their reverses.
  std::vector<std::pair<Vertex, Vertex>> fwd;
  fwd.reserve(adj_.size());
  for (Vertex v = 0; v < n_; ++v)
    for (Vertex u : neighbors(v))
      if (u != v) fwd.emplace_back(v, u);
  auto rev = fwd;
  for (auto& e : rev) std::swap(e.first, e.second);
  std::sort(fwd.begin(), fwd.end());
  std::sort(rev.begin(), rev.end());
  return fwd == rev;
}

std::uint64_t MultiGraph::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 0x100000001b3ull;
    }
  };
  mix(n_);
  for (auto o : off_) mix(o);
  for (auto a : adj_) mix(a);
  return h;
}

MultiGraph MultiGraph::from_bags(const std::vector<std::vector<Vertex>>& bags) {
  MultiGraph g;
  g.n_ = static_cast<Vertex>(bags.size());
  g.off_.assign(bags.size() + 1, 0);
  for (std::size_t v = 0; v < bags.size(); ++v)
    g.off_[v + 1] = g.off_[v] + bags[v].size();
  g.adj_.reserve(g.off_.back());
  for (const auto& bag : bags) g.adj_.insert(g.adj_.end(), bag.begin(), bag.end());
  return g;
}

MultiGraph MultiGraphBuilder::build() const {
  MultiGraph g;
  g.n_ = n_;
  g.off_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (const auto& [u, v] : edges_) {
    if (u >= n_ || v >= n_)
      fail(ErrorKind::InvalidParameter, "edge endpoint out of range");
    g.off_[u + 1]++;
    if (u != v) g.off_[v + 1]++;
  }
  for (Vertex v = 0; v < n_; ++v) g.off_[v + 1] += g.off_[v];
  g.adj_.resize(g.off_[n_]);
  std::vector<std::uint64_t> fill(g.off_.begin(), g.off_.end() - 1);
  for (const auto& [u, v] : edges_) {
    g.adj_[fill[u]++] = v;
    if (u != v) g.adj_[fill[v]++] = u;
  }
  return g;
}

}  // namespace twg
