#include "twg/oracle.hpp"

#include <algorithm>
#include <sstream>

#include "twg/error.hpp"

namespace twg {

std::string QueryTranscript::to_jsonl() const {
  std::ostringstream os;
  for (const auto& r : records) {
    os << "{\"t\":" << r.t << ",\"v\":" << r.v << ",\"k\":" << r.k << ",\"resp\":";
    if (r.star)
      os << "\"*\"";
    else
      os << r.resp;
    os << "}\n";
  }
  return os.str();
}

LabeledOracle LabeledOracle::make(const MultiGraph& g, std::uint32_t label_bits, Rng rng,
                                  Vertex entrance, bool record_transcript) {
  const std::uint64_t n = g.vertex_count();
  if (label_bits < 2 || label_bits > 62)
    fail(ErrorKind::InvalidParameter, "label_bits must be in [2, 62]");
  if ((std::uint64_t{1} << label_bits) < 4 * n)
    fail(ErrorKind::InvalidParameter, "label space must hold at least 4x vertex count");
  if (entrance >= n) fail(ErrorKind::InvalidParameter, "entrance out of range");

  LabeledOracle o;
  o.g_ = &g;
  o.bits_ = label_bits;
  for (auto& k : o.round_keys_) k = rng.next_u64();
  o.shuffle_seed_ = rng.next_u64();
  // Degree bound of at least 1 keeps (label, 1) queries well-formed on
  // degenerate graphs.
  o.d_ = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(g.max_degree()));
  o.record_ = record_transcript;
  o.entrance_label_ = o.label_of(entrance);
  return o;
}

std::uint64_t LabeledOracle::feistel(std::uint64_t x, bool inverse) const {
  // Balanced 4-round Feistel on 2*half bits; cycle-walking restricts the
  // permutation to [0, 2^bits) when bits is odd.
  const std::uint32_t half = (bits_ + 1) / 2;
  const std::uint64_t mask = (std::uint64_t{1} << half) - 1;
  const std::uint64_t domain = std::uint64_t{1} << bits_;
  auto round_fn = [&](std::uint64_t v, std::uint64_t key) {
    std::uint64_t s = v ^ key;
    return splitmix64(s) & mask;
  };
  std::uint64_t y = x;
  do {
    std::uint64_t lo = y & mask;
    std::uint64_t hi = y >> half;
    if (!inverse) {
      for (int r = 0; r < 4; ++r) {
        const std::uint64_t t = lo;
        lo = hi ^ round_fn(lo, round_keys_[r]);
        hi = t;
      }
    } else {
      for (int r = 3; r >= 0; --r) {
        const std::uint64_t t = hi;
        hi = lo ^ round_fn(hi, round_keys_[r]);
        lo = t;
      }
    }
    y = (hi << half) | lo;
  } while (y >= domain);
  return y;
}

Label LabeledOracle::label_of(Vertex v) const { return feistel(v, false); }

std::optional<Vertex> LabeledOracle::vertex_of(Label l) const {
  if (l >= (std::uint64_t{1} << bits_)) return std::nullopt;
  const std::uint64_t v = feistel(l, true);
  if (v >= g_->vertex_count()) return std::nullopt;
  return static_cast<Vertex>(v);
}

const std::vector<LabeledOracle::Slot>& LabeledOracle::bag(Vertex v) const {
  auto it = bags_.find(v);
  if (it != bags_.end()) return it->second;
  auto nbrs = g_->neighbors(v);
  std::vector<Slot> slots(nbrs.size());
  std::unordered_map<Vertex, std::uint32_t> seen;
  for (std::size_t i = 0; i < nbrs.size(); ++i)
    slots[i] = Slot{nbrs[i], seen[nbrs[i]]++};
  Rng stream = Rng(shuffle_seed_).split(v);
  stream.shuffle(slots);
  return bags_.emplace(v, std::move(slots)).first->second;
}

Label LabeledOracle::query(Label v, std::uint32_t k) {
  if (k < 1 || k > d_)
    fail(ErrorKind::InvalidParameter,
         "neighbor index k out of [1, " + std::to_string(d_) + "]");
  ++counter_;
  QueryRecord rec;
  rec.t = counter_;
  rec.v = v;
  rec.k = k;
  rec.resp = kStar;

  const auto iv = vertex_of(v);
  Label out = kStar;
  if (iv) {
    const auto& slots = bag(*iv);
    if (k <= slots.size()) {
      const Slot& s = slots[k - 1];
      out = label_of(s.nbr);
      rec.resp = out;
      rec.iv = *iv;
      rec.iu = s.nbr;
      rec.copy = s.copy;
      rec.in_graph = true;
      rec.star = false;
    } else {
      rec.iv = *iv;
      rec.in_graph = true;
    }
  }
  if (record_) transcript_.records.push_back(rec);
  return out;
}

}  // namespace twg
