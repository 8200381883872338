#include "sbm/generate.hpp"

#include "sbm/rng.hpp"

namespace sbm {

SbmInstance generate_sbm(const SbmParams& params, std::uint64_t seed) {
  const int n = params.n();
  const auto sizes = params.community_sizes();

  std::vector<int> labels(static_cast<std::size_t>(n));
  {
    int v = 0;
    for (int k = 0; k < params.k(); ++k)
      for (int i = 0; i < sizes[k]; ++i) labels[v++] = k;
  }

  // One draw per unordered pair in lexicographic order; see rng.hpp for the
  // exact stream definition.
  SplitMix64 rng(seed);
  const double p = params.p();
  const double q = params.q();
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(params.expected_edges() * 1.1) + 16);
  for (int u = 0; u < n - 1; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double draw = rng.next_unit();
      if (draw < (labels[u] == labels[v] ? p : q)) edges.emplace_back(u, v);
    }
  }

  return {Graph::from_edges(n, edges), Partition(params.k(), std::move(labels))};
}

}  // namespace sbm
