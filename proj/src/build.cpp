#include "twg/build.hpp"

#include <cmath>
#include <cstring>

#include "twg/error.hpp"
#include "twg/expanders.hpp"

namespace twg {

namespace {

bool mul_overflows(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  return __builtin_mul_overflow(a, b, &out);
}

bool add_overflows(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  return __builtin_add_overflow(a, b, &out);
}

std::uint64_t pow_int(std::uint64_t base, std::uint32_t exp, bool& sat) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    if (mul_overflows(r, base, r)) {
      sat = true;
      return ~std::uint64_t{0};
    }
  }
  return r;
}

}  // namespace

std::uint64_t TreeSpec::vertex_count() const {
  std::uint64_t total = 0, level = 1;
  for (std::uint32_t t = 0; t <= depth; ++t) {
    if (add_overflows(total, level, total)) return ~std::uint64_t{0};
    if (t < depth && mul_overflows(level, arity, level)) return ~std::uint64_t{0};
  }
  return total;
}

void InstanceLayout::resize_original(Vertex n) {
  kind.assign(n, VertexKind::Tunnel);
  cluster.assign(n, 0);
  level.assign(n, 0);
  attach.resize(n);
  for (Vertex v = 0; v < n; ++v) attach[v] = v;
  tree_depth.assign(n, 0);
  flags.assign(n, 0);
}

std::uint32_t BuildParams::effective_rounds() const {
  if (rounds) return *rounds;
  auto r = static_cast<std::uint32_t>(std::llround(std::pow(double(m), delta)));
  return std::max<std::uint32_t>(1, r);
}

std::uint64_t BuildParams::effective_trees_per_vertex() const {
  if (trees_per_vertex) return *trees_per_vertex;
  auto h = static_cast<std::uint64_t>(std::llround(std::pow(double(m), 1.0 - delta)));
  return std::max<std::uint64_t>(1, h);
}

double BuildParams::effective_lambda2() const {
  return expander_lambda2 ? *expander_lambda2 : double(m);
}

std::vector<RoundSpec> BuildParams::schedule() const {
  const std::uint32_t r = effective_rounds();
  const std::uint64_t h = effective_trees_per_vertex();
  std::vector<RoundSpec> out;
  out.reserve(r);
  for (std::uint32_t j = r; j >= 1; --j) {
    RoundSpec spec;
    spec.level = j;
    spec.trees_per_vertex = h;
    if (j - 1 < arity_override.size()) {
      spec.tree.arity = arity_override[j - 1];
      if (spec.tree.arity < 1)
        fail(ErrorKind::InvalidParameter, "decoration arity override must be positive");
    } else {
      const std::int64_t arity = static_cast<std::int64_t>(5 * m) -
                                 static_cast<std::int64_t>(j - 1) * static_cast<std::int64_t>(h) -
                                 1;
      if (arity <= 0)
        fail(ErrorKind::InvalidParameter,
             "decoration arity 5m-(j-1)h-1 non-positive at level " + std::to_string(j));
      spec.tree.arity = static_cast<std::uint64_t>(arity);
    }
    if (j - 1 < depth_override.size()) {
      spec.tree.depth = depth_override[j - 1];
    } else {
      spec.tree.depth = static_cast<std::uint32_t>(
          std::ceil(double(j) * std::pow(double(m), 3.0 * delta) - 1e-9));
    }
    out.push_back(spec);
  }
  return out;
}

void BuildParams::validate() const {
  if (m < 2) fail(ErrorKind::InvalidParameter, "m must be >= 2");
  if (k < 1) fail(ErrorKind::InvalidParameter, "k must be >= 1");
  if (ell % 2 == 0) fail(ErrorKind::InvalidParameter, "ell must be odd");
  if (ell < 2 * k + 1)
    fail(ErrorKind::InvalidParameter, "ell must be >= 2k+1 (funnels must not overlap)");
  if (memory_cap > 0xffffffffull)
    fail(ErrorKind::InvalidParameter, "memory cap exceeds vertex index range");
  schedule();  // validates arities
}

std::uint64_t cluster_size(const BuildParams& params, std::uint32_t j) {
  const std::uint32_t dist = std::min(j - 1, params.ell - j);
  const std::uint32_t e = 2 * std::min(dist, params.k);
  bool sat = false;
  return pow_int(params.m, e, sat);
}

MultiGraph build_path(std::uint32_t ell) {
  if (ell == 0) fail(ErrorKind::InvalidParameter, "path length must be positive");
  MultiGraphBuilder b(ell);
  for (Vertex v = 0; v + 1 < ell; ++v) b.add_edge(v, v + 1);
  return b.build();
}

MultiGraph build_complete_tree(const TreeSpec& spec) {
  if (spec.arity < 1) fail(ErrorKind::InvalidParameter, "tree arity must be >= 1");
  const std::uint64_t n = spec.vertex_count();
  if (n > 0xffffffffull) fail(ErrorKind::InstanceTooLarge, "tree too large");
  MultiGraphBuilder b(static_cast<Vertex>(n));
  std::uint64_t level_start = 0, level_size = 1;
  for (std::uint32_t t = 0; t < spec.depth; ++t) {
    const std::uint64_t next_start = level_start + level_size;
    for (std::uint64_t i = 0; i < level_size; ++i)
      for (std::uint64_t c = 0; c < spec.arity; ++c)
        b.add_edge(static_cast<Vertex>(level_start + i),
                   static_cast<Vertex>(next_start + i * spec.arity + c));
    level_start = next_start;
    level_size *= spec.arity;
  }
  return b.build();
}

std::pair<MultiGraph, InstanceLayout> obfuscate(const BuildParams& params, Rng& rng) {
  params.validate();
  const std::uint32_t ell = params.ell, k = params.k;
  const std::uint64_t m = params.m;

  std::vector<std::uint64_t> start(ell + 1, 0);
  for (std::uint32_t j = 1; j <= ell; ++j) {
    start[j] = start[j - 1] + (j > 1 ? cluster_size(params, j - 1) : 0);
    std::uint64_t total = start[j] + cluster_size(params, j);
    if (total > params.memory_cap)
      fail(ErrorKind::InstanceTooLarge, "obfuscated instance exceeds memory cap");
  }
  start.erase(start.begin());  // start[j-1] = first vertex of cluster j
  const std::uint64_t n = start[ell - 1] + cluster_size(params, ell);

  MultiGraphBuilder b(static_cast<Vertex>(n));
  InstanceLayout layout;
  layout.resize_original(static_cast<Vertex>(n));
  layout.ell = ell;
  layout.funnel_k = k;
  layout.entrance = 0;
  layout.exit = static_cast<Vertex>(start[ell - 1]);

  for (std::uint32_t j = 1; j <= ell; ++j) {
    const std::uint32_t dist = std::min(j - 1, ell - j);
    VertexKind kind = dist == 0 ? (j == 1 ? VertexKind::Entrance : VertexKind::Exit)
                                : (dist <= k ? VertexKind::Funnel : VertexKind::Tunnel);
    const std::uint64_t sz = cluster_size(params, j);
    for (std::uint64_t i = 0; i < sz; ++i) {
      const Vertex v = static_cast<Vertex>(start[j - 1] + i);
      layout.kind[v] = kind;
      layout.cluster[v] = j;
    }
  }

  // Funnel trees: each vertex of the k-cluster nearer a terminal gets m^2
  // children in the next one, both sides.
  const std::uint64_t m2 = m * m;
  for (std::uint32_t d = 0; d < k; ++d) {
    const std::uint32_t jl = d + 1;            // parents on the entrance side
    const std::uint32_t jr = ell - d;          // parents on the exit side
    const std::uint64_t parents = cluster_size(params, jl);
    for (std::uint64_t i = 0; i < parents; ++i)
      for (std::uint64_t c = 0; c < m2; ++c) {
        b.add_edge(static_cast<Vertex>(start[jl - 1] + i),
                   static_cast<Vertex>(start[jl] + i * m2 + c));
        b.add_edge(static_cast<Vertex>(start[jr - 1] + i),
                   static_cast<Vertex>(start[jr - 2] + i * m2 + c));
      }
  }

  // Tunnel matchings between consecutive m^{2k}-sized clusters.
  const std::uint64_t tunnel_sz = cluster_size(params, k + 1);
  for (std::uint32_t j = k + 1; j + k < ell; ++j) {
    Rng stream = rng.split(0x4d61746368ull + j);
    for (std::uint64_t t = 0; t < m; ++t) {
      auto perm = stream.permutation(static_cast<std::uint32_t>(tunnel_sz));
      for (std::uint64_t i = 0; i < tunnel_sz; ++i)
        b.add_edge(static_cast<Vertex>(start[j - 1] + i),
                   static_cast<Vertex>(start[j] + perm[i]));
    }
  }

  for (std::uint64_t t = 0; t < 2 * m; ++t) {
    b.add_loop(layout.entrance);
    b.add_loop(layout.exit);
  }

  // Conditioned expander on every interior cluster.
  for (std::uint32_t j = 2; j < ell; ++j) {
    const std::uint64_t sz = cluster_size(params, j);
    Rng stream = rng.split(0x457870ull * 1000 + j);
    RegularSample sample =
        sample_conditioned(static_cast<std::uint32_t>(sz), static_cast<std::uint32_t>(m),
                           params.effective_lambda2(), params.expander_max_attempts, stream);
    const auto& eg = sample.graph;
    for (Vertex v = 0; v < eg.vertex_count(); ++v)
      for (Vertex u : eg.neighbors(v))
        if (u >= v) b.add_edge(static_cast<Vertex>(start[j - 1] + v),
                               static_cast<Vertex>(start[j - 1] + u));
  }

  return {b.build(), std::move(layout)};
}

std::pair<MultiGraph, InstanceLayout> decorate(const MultiGraph& g,
                                               const InstanceLayout& layout,
                                               const std::vector<RoundSpec>& schedule,
                                               std::uint64_t memory_cap) {
  for (const auto& round : schedule)
    if (round.tree.arity < 1)
      fail(ErrorKind::InvalidParameter, "decoration arity must be positive");

  // Forecast the final size before building anything.
  std::uint64_t n_final = g.vertex_count();
  for (const auto& round : schedule) {
    const std::uint64_t ts = round.tree.vertex_count();
    std::uint64_t grown, factor;
    if (mul_overflows(round.trees_per_vertex, ts, factor) ||
        add_overflows(factor, 1, factor) || mul_overflows(n_final, factor, grown) ||
        grown > memory_cap)
      fail(ErrorKind::InstanceTooLarge,
           "decorated instance exceeds memory cap (" + std::to_string(memory_cap) + ")");
    n_final = grown;
  }

  MultiGraphBuilder b(static_cast<Vertex>(n_final));
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    for (Vertex u : g.neighbors(v))
      if (u >= v) b.add_edge(v, u);

  InstanceLayout out = layout;
  const bool first_ever = out.rounds_applied.empty();
  auto extend = [&out](Vertex n) {
    out.kind.resize(n, VertexKind::Decoration);
    out.cluster.resize(n, 0);
    out.level.resize(n, 0);
    out.attach.resize(n, 0);
    out.tree_depth.resize(n, 0);
    out.flags.resize(n, 0);
  };
  extend(static_cast<Vertex>(n_final));

  std::uint64_t n_now = g.vertex_count();
  for (std::size_t ri = 0; ri < schedule.size(); ++ri) {
    const RoundSpec& round = schedule[ri];
    out.rounds_applied.push_back(round);
    const bool top_level = first_ever && ri == 0;
    const std::uint64_t ts = round.tree.vertex_count();
    std::uint64_t next = n_now;
    for (std::uint64_t v = 0; v < n_now; ++v) {
      for (std::uint64_t t = 0; t < round.trees_per_vertex; ++t) {
        const std::uint64_t base = next;
        next += ts;
        b.add_edge(static_cast<Vertex>(v), static_cast<Vertex>(base));
        std::uint64_t level_start = base, level_size = 1;
        for (std::uint32_t d = 0; d <= round.tree.depth; ++d) {
          for (std::uint64_t i = 0; i < level_size; ++i) {
            const Vertex w = static_cast<Vertex>(level_start + i);
            out.level[w] = static_cast<std::uint16_t>(round.level);
            out.attach[w] = static_cast<Vertex>(v);
            out.tree_depth[w] = static_cast<std::uint16_t>(d);
            std::uint8_t f = 0;
            if (d == 0) f |= InstanceLayout::kTreeRoot;
            if (d == round.tree.depth) {
              f |= InstanceLayout::kTreeLeaf;
              if (top_level) f |= InstanceLayout::kTopLevelLeaf;
            }
            out.flags[w] = f;
            if (d < round.tree.depth)
              for (std::uint64_t c = 0; c < round.tree.arity; ++c)
                b.add_edge(w, static_cast<Vertex>(level_start + level_size +
                                                  i * round.tree.arity + c));
          }
          level_start += level_size;
          level_size *= round.tree.arity;
        }
      }
    }
    n_now = next;
  }

  return {b.build(), std::move(out)};
}

std::pair<MultiGraph, InstanceLayout> decorate(const MultiGraph& g,
                                               const InstanceLayout& layout,
                                               const BuildParams& params) {
  return decorate(g, layout, params.schedule(), params.memory_cap);
}

ForecastCounts forecast_counts(const BuildParams& params) {
  params.validate();
  ForecastCounts fc;
  fc.entrance = fc.exit = 1;
  for (std::uint32_t j = 2; j < params.ell; ++j) {
    const std::uint32_t dist = std::min(j - 1, params.ell - j);
    if (dist <= params.k)
      fc.funnel += cluster_size(params, j);
    else
      fc.tunnel += cluster_size(params, j);
  }
  std::uint64_t total = fc.entrance + fc.exit + fc.funnel + fc.tunnel;
  const std::uint64_t original = total;

  const auto schedule = params.schedule();
  for (const auto& round : schedule) {
    const std::uint64_t ts = round.tree.vertex_count();
    std::uint64_t factor;
    if (mul_overflows(round.trees_per_vertex, ts, factor) ||
        add_overflows(factor, 1, factor) || mul_overflows(total, factor, total)) {
      fc.saturated = true;
      total = ~std::uint64_t{0};
      break;
    }
  }
  fc.vertex_count = total;
  fc.decoration = fc.saturated ? ~std::uint64_t{0} : total - original;

  // Degree candidates after all rounds; every original vertex gains r*h.
  const std::uint64_t m = params.m;
  const std::uint64_t rh =
      static_cast<std::uint64_t>(schedule.size()) * params.effective_trees_per_vertex();
  std::uint64_t d = m * m + 2 * m + rh;  // entrance/exit: m^2 children + 2m loop entries
  if (params.k >= 2)                     // interior funnel: parent + m^2 children + expander
    d = std::max(d, m * m + 2 * m + 1 + rh);
  if (params.ell > 2 * params.k + 1) {
    d = std::max(d, 3 * m + 1 + rh);  // funnel at distance k: parent + matchings + expander
    d = std::max(d, 4 * m + rh);      // tunnel
  } else {
    d = std::max(d, 2 * m + 2 + rh);  // middle cluster joins both funnels
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& round = schedule[i];
    const std::uint64_t later = static_cast<std::uint64_t>(schedule.size() - 1 - i) *
                                params.effective_trees_per_vertex();
    if (round.tree.depth > 0) d = std::max(d, round.tree.arity + 1 + later);
    d = std::max(d, 1 + later);  // leaves
  }
  fc.max_degree = d;
  return fc;
}

InstanceLayout plain_layout(const MultiGraph& g, Vertex entrance, Vertex exit) {
  InstanceLayout layout;
  layout.resize_original(g.vertex_count());
  for (Vertex v = 0; v < g.vertex_count(); ++v) layout.cluster[v] = v + 1;
  layout.kind[entrance] = VertexKind::Entrance;
  if (exit != entrance) layout.kind[exit] = VertexKind::Exit;
  layout.entrance = entrance;
  layout.exit = exit;
  layout.ell = g.vertex_count();
  layout.funnel_k = 0;
  return layout;
}

std::pair<MultiGraph, InstanceLayout> build_instance(const BuildParams& params) {
  Rng rng(params.seed);
  auto [g, layout] = obfuscate(params, rng);
  const auto schedule = params.schedule();
  if (params.rounds && *params.rounds == 0) return {std::move(g), std::move(layout)};
  return decorate(g, layout, schedule, params.memory_cap);
}

}  // namespace twg
