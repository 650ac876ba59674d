#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "twg/multigraph.hpp"
#include "twg/rng.hpp"

namespace twg {

using Label = std::uint64_t;

struct QueryRecord {
  std::uint64_t t;   // 1-based query ordinal
  Label v;
  std::uint32_t k;
  Label resp;        // kStar for out-of-range / unknown-label queries
  // Ground-truth enrichment, never visible through the query interface.
  Vertex iv = 0;         // internal id of the queried vertex (if in graph)
  Vertex iu = 0;         // internal id of the response
  std::uint32_t copy = 0;  // which parallel copy of the edge {iv,iu}
  bool in_graph = false;
  bool star = true;
};

struct QueryTranscript {
  std::vector<QueryRecord> records;

  // JSON lines export, one record per query: {t, v, k, resp}.
  std::string to_jsonl() const;
};

// Query-metered adjacency-list interface over randomly relabeled vertices.
// Labels live in [0, 2^label_bits); vertices map through a seeded Feistel
// permutation so clones with fresh seeds are cheap on large instances.
// Neighbor lists are shuffled per vertex (lazily, deterministic per seed).
class LabeledOracle {
 public:
  static constexpr Label kStar = ~Label{0};

  static LabeledOracle make(const MultiGraph& g, std::uint32_t label_bits, Rng rng,
                            Vertex entrance, bool record_transcript = true);

  // k is 1-based and must lie in [1, degree_bound]; out-of-range k throws
  // without charging. Everything else costs exactly one query.
  Label query(Label v, std::uint32_t k);

  std::uint64_t queries_used() const { return counter_; }
  std::uint32_t degree_bound() const { return d_; }
  Label entrance_label() const { return entrance_label_; }
  std::uint32_t label_bits() const { return bits_; }

  const QueryTranscript& transcript() const { return transcript_; }
  const MultiGraph& graph() const { return *g_; }

  // Ground-truth helpers for harness / tests (not part of the query surface).
  Label label_of(Vertex v) const;
  std::optional<Vertex> vertex_of(Label l) const;

 private:
  struct Slot {
    Vertex nbr;
    std::uint32_t copy;
  };

  const std::vector<Slot>& bag(Vertex v) const;
  std::uint64_t feistel(std::uint64_t x, bool inverse) const;

  const MultiGraph* g_ = nullptr;
  std::uint32_t bits_ = 0;
  std::array<std::uint64_t, 4> round_keys_{};
  std::uint64_t shuffle_seed_ = 0;
  std::uint32_t d_ = 0;
  Label entrance_label_ = 0;
  std::uint64_t counter_ = 0;
  bool record_ = true;
  QueryTranscript transcript_;
  mutable std::unordered_map<Vertex, std::vector<Slot>> bags_;
};

}  // namespace twg
