#include <doctest.h>

#include <algorithm>

#include "twg/error.hpp"
#include "twg/multigraph.hpp"
#include "twg/rng.hpp"

using namespace twg;

namespace {

MultiGraph random_multigraph(Rng& rng, Vertex n, std::size_t edges, bool loops) {
  MultiGraphBuilder b(n);
  for (std::size_t i = 0; i < edges; ++i) {
    Vertex u = static_cast<Vertex>(rng.below(n));
    Vertex v = static_cast<Vertex>(rng.below(n));
    if (!loops && u == v) v = (v + 1) % n;
    b.add_edge(u, v);
  }
  return b.build();
}

}  // namespace

TEST_CASE("builder produces symmetric bags with matching multiplicities") {
  Rng rng(42);
  for (int rep = 0; rep < 30; ++rep) {
    const Vertex n = 2 + static_cast<Vertex>(rng.below(20));
    auto g = random_multigraph(rng, n, rng.below(60), true);
    CHECK(g.is_symmetric());
    std::uint64_t total = 0;
    for (Vertex v = 0; v < n; ++v) total += g.degree(v);
    CHECK(total == g.entry_count());
  }
}

TEST_CASE("self-loops occupy one entry and count once in edge totals") {
  MultiGraphBuilder b(2);
  b.add_edge(0, 1);
  b.add_loop(0);
  b.add_loop(0);
  auto g = b.build();
  CHECK(g.degree(0) == 3);  // neighbor + two loop entries
  CHECK(g.degree(1) == 1);
  CHECK(g.loop_count(0) == 2);
  CHECK(g.edge_count() == 3);
  CHECK(g.is_symmetric());
}

TEST_CASE("parallel edges keep multiplicity") {
  MultiGraphBuilder b(2);
  b.add_edge(0, 1);
  b.add_edge(1, 0);
  auto g = b.build();
  CHECK(g.degree(0) == 2);
  CHECK(g.degree(1) == 2);
  CHECK(g.edge_count() == 2);
}

TEST_CASE("hash is stable and sensitive") {
  Rng rng1(7), rng2(7), rng3(8);
  auto a = random_multigraph(rng1, 12, 30, true);
  auto b = random_multigraph(rng2, 12, 30, true);
  auto c = random_multigraph(rng3, 12, 30, true);
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
}

TEST_CASE("from_bags preserves bag order verbatim") {
  std::vector<std::vector<Vertex>> bags = {{2, 1, 1}, {0, 0}, {0}};
  auto g = MultiGraph::from_bags(bags);
  CHECK(g.is_symmetric());
  auto nb = g.neighbors(0);
  CHECK(nb[0] == 2);
  CHECK(nb[1] == 1);
  CHECK(nb[2] == 1);
}

TEST_CASE("out-of-range edges are rejected") {
  MultiGraphBuilder b(2);
  b.add_edge(0, 5);
  CHECK_THROWS_AS(b.build(), Error);
}
