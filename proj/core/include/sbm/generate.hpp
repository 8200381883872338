#pragma once

#include <cstdint>

#include "sbm/graph.hpp"
#include "sbm/params.hpp"
#include "sbm/partition.hpp"

namespace sbm {

struct SbmInstance {
  Graph graph;
  Partition truth;
};

// Draws a graph from the model. Ground truth assigns vertices 0..size_0-1 to
// community 0 and so on contiguously. One SplitMix64 draw per unordered pair
// (u, v), u ascending then v, from a stream seeded with `seed`; the edge is
// present iff the unit draw is < p (same community) or < q (different).
// Bit-reproducible given (params, seed).
SbmInstance generate_sbm(const SbmParams& params, std::uint64_t seed);

}  // namespace sbm
