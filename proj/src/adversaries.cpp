#include "twg/adversaries.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "twg/error.hpp"

namespace twg {

namespace {

// Shared walk/BFS bookkeeping over the label interface only (plus the final
// ground-truth classification, which sees the transcript).
struct Explorer {
  LabeledOracle& o;
  const InstanceLayout& layout;
  std::uint64_t budget;
  bool declared_exit = false;
  bool out_of_budget = false;
  std::unordered_map<Label, std::vector<Label>> nbrs;

  bool charge_ok() const { return o.queries_used() < budget; }

  // Sequential probing until the first star; caches the neighbor list.
  // Returns nullptr if the budget ran out mid-probe.
  const std::vector<Label>* probe(Label v) {
    auto it = nbrs.find(v);
    if (it != nbrs.end()) return &it->second;
    std::vector<Label> list;
    for (std::uint32_t k = 1; k <= o.degree_bound(); ++k) {
      if (!charge_ok()) {
        out_of_budget = true;
        return nullptr;
      }
      const Label resp = o.query(v, k);
      if (resp == LabeledOracle::kStar) break;
      if (resp == v && v != o.entrance_label()) declared_exit = true;
      list.push_back(resp);
    }
    return &nbrs.emplace(v, std::move(list)).first->second;
  }
};

TrialOutcome finish(const LabeledOracle& o, const InstanceLayout& layout,
                    bool declared) {
  TrialOutcome out;
  out.declared_exit = declared;
  out.queries = o.queries_used();
  out.events = classify(o.transcript(), layout);
  std::uint32_t deepest = layout.cluster[layout.entrance];
  bool discovered_exit = false;
  for (const auto& r : o.transcript().records) {
    if (r.star) continue;
    if (r.iu == layout.exit && !discovered_exit) {
      discovered_exit = true;
      out.queries_to_exit = r.t;
    }
    if (layout.cluster[r.iu] > deepest) deepest = layout.cluster[r.iu];
  }
  out.deepest_cluster = deepest;
  out.found_exit = declared || discovered_exit;
  return out;
}

}  // namespace

TrialOutcome random_walk_trial(LabeledOracle& o, const InstanceLayout& layout,
                               std::uint64_t budget, Rng& rng) {
  if (budget < 1) fail(ErrorKind::InvalidParameter, "budget must be >= 1");
  Explorer ex{o, layout, budget, false, false, {}};
  Label current = o.entrance_label();
  while (!ex.declared_exit) {
    const auto* list = ex.probe(current);
    if (!list) break;  // budget exhausted mid-probe
    if (ex.declared_exit) break;
    if (list->empty()) break;  // isolated vertex, nowhere to go
    if (!ex.charge_ok()) break;
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng.below(list->size()));
    const Label resp = o.query(current, k);
    if (resp == current && current != o.entrance_label()) {
      ex.declared_exit = true;
      break;
    }
    current = resp;
  }
  return finish(o, layout, ex.declared_exit);
}

TrialOutcome bfs_trial(LabeledOracle& o, const InstanceLayout& layout,
                       std::uint64_t budget) {
  if (budget < 1) fail(ErrorKind::InvalidParameter, "budget must be >= 1");
  Explorer ex{o, layout, budget, false, false, {}};
  std::vector<Label> queue{o.entrance_label()};
  std::unordered_set<Label> seen{o.entrance_label()};
  std::size_t head = 0;
  while (head < queue.size() && !ex.declared_exit) {
    const Label v = queue[head++];
    const auto* list = ex.probe(v);
    if (!list) break;
    if (ex.declared_exit) break;
    for (Label u : *list)
      if (seen.insert(u).second) queue.push_back(u);
  }
  return finish(o, layout, ex.declared_exit);
}

ProbeResult nonbacktracking_probe(LabeledOracle& o, Label from, Label via,
                                  std::uint32_t depth, Rng& rng) {
  if (depth < 1) fail(ErrorKind::InvalidParameter, "probe depth must be >= 1");
  std::unordered_map<Label, std::vector<Label>> cache;
  auto neighbors = [&](Label v) -> const std::vector<Label>& {
    auto it = cache.find(v);
    if (it != cache.end()) return it->second;
    std::vector<Label> list;
    for (std::uint32_t k = 1; k <= o.degree_bound(); ++k) {
      const Label resp = o.query(v, k);
      if (resp == LabeledOracle::kStar) break;
      list.push_back(resp);
    }
    return cache.emplace(v, std::move(list)).first->second;
  };

  std::unordered_set<Label> visited{from, via};
  Label prev = from, cur = via;
  for (std::uint32_t step = 0; step <= depth; ++step) {
    const auto& list = neighbors(cur);
    if (list.size() <= 1) return ProbeResult::LeafHit;
    if (step == depth) return ProbeResult::Survived;
    // Exclude one copy of the edge back; parallel edges may still return.
    std::vector<Label> options;
    options.reserve(list.size());
    bool skipped_back = false;
    for (Label u : list) {
      if (!skipped_back && u == prev) {
        skipped_back = true;
        continue;
      }
      options.push_back(u);
    }
    if (options.empty()) return ProbeResult::LeafHit;  // stuck
    const Label next = options[rng.below(options.size())];
    if (!visited.insert(next).second) return ProbeResult::CycleHit;
    prev = cur;
    cur = next;
  }
  return ProbeResult::Survived;
}

std::uint8_t classify(const QueryTranscript& t, const InstanceLayout& layout) {
  std::uint8_t events = 0;
  std::unordered_set<Vertex> discovered{layout.entrance};
  for (const auto& r : t.records) {
    if (r.star) continue;
    if (r.iu >= layout.kind.size() || r.iv >= layout.kind.size())
      fail(ErrorKind::InvalidParameter, "transcript does not match layout");
    discovered.insert(r.iu);
  }

  for (Vertex v : discovered)
    if (layout.has_flag(v, InstanceLayout::kTopLevelLeaf)) {
      events |= kLeafFound;
      break;
    }

  // Cycle detection over distinct physical edges inside the tunnel.
  {
    std::unordered_map<Vertex, Vertex> parent;
    auto find = [&](Vertex x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    std::set<std::tuple<Vertex, Vertex, std::uint32_t>> edges;
    for (const auto& r : t.records) {
      if (r.star) continue;
      if (!layout.is_tunnel(r.iv) || !layout.is_tunnel(r.iu)) continue;
      const Vertex a = std::min(r.iv, r.iu), b = std::max(r.iv, r.iu);
      if (!edges.insert({a, b, r.copy}).second) continue;  // same physical edge
      parent.try_emplace(a, a);
      parent.try_emplace(b, b);
      const Vertex ra = find(a), rb = find(b);
      if (ra == rb) {
        events |= kTunnelCycleFound;
        break;
      }
      parent[ra] = rb;
    }
  }

  if (layout.ell > 0) {
    const std::uint32_t lo = layout.funnel_k + 1;
    const std::uint32_t hi = layout.ell - layout.funnel_k;
    std::vector<std::uint8_t> hit(layout.ell + 1, 0);
    for (Vertex v : discovered)
      if (layout.cluster[v] > 0) hit[layout.cluster[v]] = 1;
    bool all = lo <= hi;
    for (std::uint32_t j = lo; j <= hi && all; ++j)
      if (!hit[j]) all = false;
    if (all) events |= kTunnelTraversed;
  }
  return events;
}

std::uint32_t auto_label_bits(const MultiGraph& g) {
  std::uint32_t bits = 3;
  while ((std::uint64_t{1} << bits) < 4ull * g.vertex_count()) ++bits;
  return std::max<std::uint32_t>(bits, 8);
}

BinomialCI binomial_ci(std::uint64_t hits, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 0.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double half = z * std::sqrt(p * (1.0 - p) / n) + 0.5 / n;
  return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

double drop_pvalue(std::uint64_t hits_a, std::uint64_t n_a, std::uint64_t hits_b,
                   std::uint64_t n_b) {
  if (n_a == 0 || n_b == 0) return 1.0;
  const double pa = double(hits_a) / double(n_a);
  const double pb = double(hits_b) / double(n_b);
  const double pool = double(hits_a + hits_b) / double(n_a + n_b);
  const double se = std::sqrt(pool * (1.0 - pool) * (1.0 / n_a + 1.0 / n_b));
  if (se == 0.0) return pa > pb ? 0.0 : 1.0;
  const double zstat = (pa - pb) / se;
  return 0.5 * std::erfc(zstat / std::sqrt(2.0));
}

TrialStats aggregate(std::vector<TrialOutcome> outcomes, std::uint32_t failures) {
  TrialStats s;
  s.trials = static_cast<std::uint32_t>(outcomes.size());
  s.construction_failures = failures;
  std::vector<std::uint64_t> queries;
  queries.reserve(outcomes.size());
  for (const auto& t : outcomes) {
    if (t.found_exit) ++s.hits;
    if (t.events & kLeafFound) ++s.leaf_found;
    if (t.events & kTunnelCycleFound) ++s.tunnel_cycle_found;
    if (t.events & kTunnelTraversed) ++s.tunnel_traversed;
    s.total_queries += t.queries;
    queries.push_back(t.queries);
    std::size_t bucket = 0;
    while ((std::uint64_t{1} << (bucket + 1)) <= std::max<std::uint64_t>(t.queries, 1))
      ++bucket;
    if (s.query_hist_log2.size() <= bucket) s.query_hist_log2.resize(bucket + 1, 0);
    ++s.query_hist_log2[bucket];
  }
  if (s.trials > 0) {
    s.hit_rate = double(s.hits) / double(s.trials);
    s.hit_ci = binomial_ci(s.hits, s.trials);
    s.mean_queries = double(s.total_queries) / double(s.trials);
    std::sort(queries.begin(), queries.end());
    s.median_queries = queries[queries.size() / 2];
  }
  s.outcomes = std::move(outcomes);
  return s;
}

TrialStats run_suite(const SuiteConfig& config) {
  if (config.adversary != "random_walk" && config.adversary != "bfs")
    fail(ErrorKind::InvalidParameter, "unknown adversary '" + config.adversary + "'");

  Rng master(config.master_seed);
  std::optional<std::pair<MultiGraph, InstanceLayout>> shared;
  if (!config.fresh_instance_per_trial) shared = build_instance(config.instance);

  const std::uint32_t n_trials = config.trials;
  std::vector<TrialOutcome> outcomes(n_trials);
  std::vector<std::uint8_t> failed(n_trials, 0);

#pragma omp parallel for schedule(dynamic) if (config.parallel)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n_trials); ++i) {
    try {
      const MultiGraph* g = nullptr;
      const InstanceLayout* layout = nullptr;
      std::optional<std::pair<MultiGraph, InstanceLayout>> own;
      if (config.fresh_instance_per_trial) {
        BuildParams p = config.instance;
        p.seed = master.split(0xB111Dull + i).next_u64();
        own = build_instance(p);
        g = &own->first;
        layout = &own->second;
      } else {
        g = &shared->first;
        layout = &shared->second;
      }
      const std::uint32_t bits =
          config.label_bits ? config.label_bits : auto_label_bits(*g);
      LabeledOracle oracle =
          LabeledOracle::make(*g, bits, master.split(0x07ac1eull * 31 + i),
                              layout->entrance, true);
      Rng walk_rng = master.split(0x3a1full * 131 + i);
      if (config.adversary == "random_walk")
        outcomes[i] = random_walk_trial(oracle, *layout, config.budget, walk_rng);
      else
        outcomes[i] = bfs_trial(oracle, *layout, config.budget);
    } catch (const Error&) {
      failed[i] = 1;
    }
  }

  std::uint32_t failures = 0;
  std::vector<TrialOutcome> kept;
  kept.reserve(n_trials);
  for (std::uint32_t i = 0; i < n_trials; ++i) {
    if (failed[i])
      ++failures;
    else
      kept.push_back(outcomes[i]);
  }
  return aggregate(std::move(kept), failures);
}

}  // namespace twg
