#pragma once

#include <cstdint>

#include "twg/multigraph.hpp"
#include "twg/rng.hpp"

namespace twg {

struct RegularSample {
  MultiGraph graph;
  std::uint32_t attempts = 0;
  double lambda2 = 0.0;
};

// Uniformly random cycle on [n]: edges between position-consecutive vertices
// of a uniform permutation.
MultiGraph sample_cycle(std::uint32_t n, Rng& rng);

// H_{n,d}: union of d/2 independent random cycles, multiplicities kept.
MultiGraph sample_regular(std::uint32_t n, std::uint32_t d, Rng& rng);

// Second-largest adjacency eigenvalue by value, multiplicities respected.
// Dense solve for n <= 512, shifted power iteration with deflation above.
double second_eigenvalue(const MultiGraph& g);

// Rejection-sample H_{n,2m} until lambda2 <= threshold.
RegularSample sample_conditioned(std::uint32_t n, std::uint32_t m, double threshold,
                                 std::uint32_t max_attempts, Rng& rng);

}  // namespace twg
