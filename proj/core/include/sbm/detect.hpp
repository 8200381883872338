#pragma once

#include <cstdint>
#include <vector>

#include "sbm/graph.hpp"
#include "sbm/partition.hpp"
#include "sbm/spectral.hpp"

namespace sbm {

// Step 1: keep vertices with degree <= multiplier * K * degree_sum / n.
struct TrimResult {
  std::vector<int> gamma;    // kept vertices, ascending
  std::vector<int> removed;  // ascending
  double threshold = 0;
  bool degenerate = false;  // no edges: threshold 0, everything kept
};

TrimResult trim(const Graph& g, int k, double multiplier = 5.0);

// Step 2 bookkeeping, one record per evaluated radius index i.
struct RadiusRecord {
  std::int64_t radius_index = 0;  // i, 1-based
  double radius = 0;              // i * degree_sum / (100 n^2)
  std::vector<int> centers;                // gamma-local index per cluster; -1 if unseeded
  std::vector<int> core_sizes;             // |T_{i,k}| before leftover assignment
  std::vector<std::vector<int>> clusters;  // gamma-local members after leftover assignment
  std::vector<std::vector<double>> xi;     // cluster means in embedding coords; empty if empty
  double residual = 0;                     // r_i
};

struct DecompositionTrace {
  std::vector<RadiusRecord> records;
  int chosen = 0;  // index into records of i* = argmin r_i (lowest i on ties)
  Embedding embedding;
};

struct DecomposeOptions {
  double tol = 1e-6;
  int oversampling = 8;
  int max_iters = 0;     // 0: schedule from tol
  int radius_count = 0;  // > 0: consecutive grid 1..radius_count exactly;
                         // 0: adaptive grid, see spectral_decompose
  int threads = 1;
};

struct DecomposeResult {
  Partition partition;  // over gamma, local indexing
  DecompositionTrace trace;
};

// Step 2: K-rank embedding of A_Gamma, ball construction at each radius
// i * degree_sum / (100 n^2) for integer i, greedy center peeling, mean
// computation, leftover assignment to the nearest mean, and selection of the
// radius minimizing the residual. n and degree_sum are those of the
// untrimmed graph. Ties (peeling argmax, nearest mean, argmin residual)
// resolve to the lowest index; the seed drives the embedding.
// The default grid evaluates consecutive indices
// 1..max(ceil(ln n), 50) and then geometric integer steps until some ball
// covers all of gamma, so that community-capture radii are always reached;
// the residual argmin discards oversized radii on its own.
DecomposeResult spectral_decompose(const Graph& g, const TrimResult& tr, int k,
                                   std::uint64_t seed,
                                   const DecomposeOptions& options = {});

struct ImproveResult {
  Partition partition;
  std::vector<int> deltas;  // vertices that changed community, per round
};

// Step 3: `iterations` synchronous rounds; every vertex moves to the
// community maximizing e(v, S_k) / |S_k| over the previous round's
// communities (exact integer comparison; empty communities never win; ties
// uniform via a counter RNG keyed by (round, vertex), so results are
// independent of thread scheduling). first_round offsets the round keys so
// that i rounds followed by j rounds equals i + j rounds in one call.
ImproveResult improve(const Graph& g, const Partition& initial, int iterations,
                      std::uint64_t seed, int first_round = 0, int threads = 1);

struct DetectConfig {
  std::uint64_t seed = 0;
  double trim_multiplier = 5.0;
  int improve_iterations = 0;  // 0: ceil(ln n)
  int radius_count = 0;        // 0: ceil(ln n)
  double tol = 1e-6;
  int oversampling = 8;
  int max_iters = 0;
  int threads = 1;
  const Partition* truth = nullptr;  // simulation-only instrumentation
};

struct DetectionResult {
  Partition estimate;  // covers all n vertices
  DecompositionTrace trace;
  std::vector<int> improvement_deltas;
  // When truth was given: {after spectral stage (over gamma),
  // after trimmed-vertex assignment (full), after improvement (full)}.
  std::vector<int> stage_misclassified;
  bool degenerate = false;
  int trimmed = 0;
  int iterations = 0;
};

// The full pipeline: trim, spectral decomposition, assignment of trimmed
// vertices by the improvement scoring rule against the spectral clusters,
// then ceil(ln n) improvement rounds. Deterministic given (g, k, config).
DetectionResult spectral_partition(const Graph& g, int k, const DetectConfig& config = {});

}  // namespace sbm
