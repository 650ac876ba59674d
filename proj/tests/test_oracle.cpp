#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "twg/build.hpp"
#include "twg/error.hpp"
#include "twg/oracle.hpp"

using namespace twg;

namespace {

BuildParams tiny_instance_params(std::uint64_t m, std::uint32_t k, std::uint32_t ell,
                                 std::uint64_t seed) {
  BuildParams p;
  p.m = m;
  p.k = k;
  p.ell = ell;
  p.rounds = 0;
  p.expander_lambda2 = 2.0 * std::sqrt(2.0 * double(m) - 1.0) + 0.3;
  p.seed = seed;
  return p;
}

// Full probe of one vertex: all k in [1, d].
std::vector<Label> probe_all(LabeledOracle& o, Label v) {
  std::vector<Label> out;
  for (std::uint32_t k = 1; k <= o.degree_bound(); ++k) out.push_back(o.query(v, k));
  return out;
}

}  // namespace

TEST_CASE("single-vertex oracle returns star") {
  MultiGraphBuilder b(1);
  auto g = b.build();
  auto o = LabeledOracle::make(g, 8, Rng(1), 0);
  CHECK(o.query(o.entrance_label(), 1) == LabeledOracle::kStar);
  CHECK(o.queries_used() == 1);
}

TEST_CASE("path oracle neighbor lookups and star") {
  auto g = build_path(3);
  auto o = LabeledOracle::make(g, 8, Rng(2), 0);
  const Label n1 = o.query(o.entrance_label(), 1);
  CHECK(n1 != LabeledOracle::kStar);
  CHECK(n1 == o.label_of(1));
  CHECK(o.query(o.entrance_label(), 2) == LabeledOracle::kStar);
  CHECK(o.queries_used() == 2);
}

TEST_CASE("same seed reproduces labeling and shuffles") {
  auto params = tiny_instance_params(2, 1, 5, 3);
  auto [g, layout] = build_instance(params);
  auto o1 = LabeledOracle::make(g, 12, Rng(77), layout.entrance);
  auto o2 = LabeledOracle::make(g, 12, Rng(77), layout.entrance);
  CHECK(o1.entrance_label() == o2.entrance_label());
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    CHECK(o1.label_of(v) == o2.label_of(v));
  CHECK(probe_all(o1, o1.entrance_label()) == probe_all(o2, o2.entrance_label()));
}

TEST_CASE("labels are distinct and invertible") {
  auto params = tiny_instance_params(2, 1, 7, 4);
  auto [g, layout] = build_instance(params);
  auto o = LabeledOracle::make(g, 10, Rng(5), layout.entrance);
  std::set<Label> labels;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const Label l = o.label_of(v);
    CHECK(l < (std::uint64_t{1} << 10));
    labels.insert(l);
    CHECK(o.vertex_of(l) == v);
  }
  CHECK(labels.size() == g.vertex_count());
}

TEST_CASE("unknown labels cost a query and return star") {
  auto g = build_path(4);
  auto o = LabeledOracle::make(g, 16, Rng(6), 0);
  std::uint64_t misses = 0;
  for (Label l = 0; l < 200; ++l)
    if (!o.vertex_of(l)) {
      ++misses;
      CHECK(o.query(l, 1) == LabeledOracle::kStar);
    }
  CHECK(misses > 0);
  CHECK(o.queries_used() == misses);
}

TEST_CASE("out-of-range k throws and is not charged") {
  auto g = build_path(3);
  auto o = LabeledOracle::make(g, 8, Rng(7), 0);
  CHECK_THROWS_AS(o.query(o.entrance_label(), 0), Error);
  CHECK_THROWS_AS(o.query(o.entrance_label(), o.degree_bound() + 1), Error);
  CHECK(o.queries_used() == 0);
  CHECK(o.transcript().records.empty());
}

TEST_CASE("counter equals transcript length under a random query mix") {
  auto params = tiny_instance_params(2, 1, 5, 8);
  auto [g, layout] = build_instance(params);
  auto o = LabeledOracle::make(g, 12, Rng(9), layout.entrance);
  Rng rng(10);
  Label known = o.entrance_label();
  for (int i = 0; i < 500; ++i) {
    const Label v = rng.below(4) == 0 ? rng.below(1 << 12) : known;
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng.below(o.degree_bound()));
    const Label resp = o.query(v, k);
    if (resp != LabeledOracle::kStar) known = resp;
  }
  CHECK(o.queries_used() == 500);
  CHECK(o.transcript().records.size() == 500);
}

TEST_CASE("oracle symmetry: responses contain the reverse edge") {
  auto params = tiny_instance_params(2, 2, 7, 11);
  auto [g, layout] = build_instance(params);
  auto o = LabeledOracle::make(g, 12, Rng(12), layout.entrance);
  Rng rng(13);
  for (int rep = 0; rep < 40; ++rep) {
    const Vertex v = static_cast<Vertex>(rng.below(g.vertex_count()));
    const Label vl = o.label_of(v);
    auto resp = probe_all(o, vl);
    for (Label u : resp) {
      if (u == LabeledOracle::kStar || u == vl) continue;
      auto back = probe_all(o, u);
      CHECK(std::count(back.begin(), back.end(), vl) > 0);
    }
  }
}

TEST_CASE("EXIT is recognizable by its self-loop responses") {
  auto params = tiny_instance_params(2, 1, 5, 14);
  auto [g, layout] = build_instance(params);
  auto o = LabeledOracle::make(g, 12, Rng(15), layout.entrance);
  const Label exit_label = o.label_of(layout.exit);
  auto resp = probe_all(o, exit_label);
  const auto self_hits = std::count(resp.begin(), resp.end(), exit_label);
  CHECK(self_hits == 2 * 2);  // 2m loop slots answer with the vertex itself
}

TEST_CASE("tunnel vertices answer exactly 4m non-star probes") {
  auto params = tiny_instance_params(3, 1, 9, 16);
  auto [g, layout] = build_instance(params);
  auto o = LabeledOracle::make(g, 14, Rng(17), layout.entrance);
  int tested = 0;
  for (Vertex v = 0; v < g.vertex_count() && tested < 5; ++v) {
    if (!layout.is_tunnel(v)) continue;
    ++tested;
    auto resp = probe_all(o, o.label_of(v));
    const auto non_star =
        std::count_if(resp.begin(), resp.end(),
                      [](Label l) { return l != LabeledOracle::kStar; });
    CHECK(non_star == 4 * 3);
  }
  CHECK(tested == 5);
}

TEST_CASE("label-blindness: relabeling preserves the visible degree structure") {
  auto params = tiny_instance_params(2, 1, 5, 18);
  auto [g, layout] = build_instance(params);

  auto degree_profile = [&](std::uint64_t seed) {
    auto o = LabeledOracle::make(g, 12, Rng(seed), layout.entrance);
    // Exhaustive local exploration; the multiset of (vertex degree, sorted
    // neighbor degrees) is a relabeling invariant.
    std::map<Label, std::vector<Label>> adj;
    std::vector<Label> queue{o.entrance_label()};
    std::set<Label> seen{o.entrance_label()};
    while (!queue.empty()) {
      const Label v = queue.back();
      queue.pop_back();
      auto resp = probe_all(o, v);
      std::vector<Label> nbrs;
      for (Label u : resp)
        if (u != LabeledOracle::kStar) {
          nbrs.push_back(u);
          if (seen.insert(u).second) queue.push_back(u);
        }
      adj[v] = nbrs;
    }
    std::multiset<std::vector<std::size_t>> profile;
    for (const auto& [v, nbrs] : adj) {
      std::vector<std::size_t> row{nbrs.size()};
      std::vector<std::size_t> ds;
      for (Label u : nbrs) ds.push_back(adj.at(u).size());
      std::sort(ds.begin(), ds.end());
      row.insert(row.end(), ds.begin(), ds.end());
      profile.insert(row);
    }
    return profile;
  };

  CHECK(degree_profile(100) == degree_profile(200));
}

TEST_CASE("label space must hold 4x the vertex count") {
  auto g = build_path(40);
  CHECK_THROWS_AS(LabeledOracle::make(g, 7, Rng(1), 0), Error);  // 128 < 160
  CHECK_NOTHROW(LabeledOracle::make(g, 8, Rng(1), 0));
}

TEST_CASE("transcript exports one JSON line per query") {
  auto g = build_path(3);
  auto o = LabeledOracle::make(g, 8, Rng(19), 0);
  o.query(o.entrance_label(), 1);
  o.query(12345 % 256, 2);
  const std::string jsonl = o.transcript().to_jsonl();
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 2);
  CHECK(jsonl.find("\"t\":1") != std::string::npos);
  CHECK(jsonl.find("\"k\":2") != std::string::npos);
  CHECK(jsonl.find("\"resp\":\"*\"") != std::string::npos);
}
