#include "sbm/detect.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "sbm/parallel.hpp"
#include "sbm/rng.hpp"
#include "sbm/sparse.hpp"

namespace sbm {

namespace {

int default_rounds(int n) {
  return std::max(1, static_cast<int>(std::ceil(std::log(static_cast<double>(n)))));
}

// Radius indices to evaluate. The peeling needs at least one radius at the
// community-capture scale (balls covering whole clusters); with asymmetric
// sizes, smaller radii systematically seed several centers inside the
// largest community. That scale sits orders of magnitude past ceil(ln n)
// steps of the base radius unit, so after a consecutive prefix the
// grid continues in geometric integer steps until some ball covers all of
// gamma (max_bucket). Oversized radii are argmin-protected: their residual
// is enormous and never selected.
std::vector<std::int64_t> radius_grid(int prefix, std::int64_t max_bucket) {
  std::vector<std::int64_t> grid;
  for (int i = 1; i <= prefix; ++i) grid.push_back(i);
  std::int64_t i = prefix;
  while (i < max_bucket) {
    i = std::max(i + 1, (i * 13) / 10);
    grid.push_back(std::min(i, max_bucket));
  }
  return grid;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double sq = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sq += d * d;
  }
  return sq;
}

// cnt_a / size_a > cnt_b / size_b, exactly, sizes positive.
bool score_greater(std::int64_t cnt_a, std::int64_t size_a, std::int64_t cnt_b,
                   std::int64_t size_b) {
  return cnt_a * size_b > cnt_b * size_a;
}

bool score_equal(std::int64_t cnt_a, std::int64_t size_a, std::int64_t cnt_b,
                 std::int64_t size_b) {
  return cnt_a * size_b == cnt_b * size_a;
}

// Picks argmax_k cnt[k]/sizes[k] over communities with sizes[k] > 0; exact
// integer comparison, ties uniform via the keyed stream.
int pick_best_community(const std::vector<std::int64_t>& cnt,
                        const std::vector<int>& sizes, std::vector<int>& tied,
                        std::uint64_t stream, std::uint64_t key_a, std::uint64_t key_b) {
  tied.clear();
  for (std::size_t k = 0; k < cnt.size(); ++k) {
    if (sizes[k] <= 0) continue;  // empty community scores -inf
    if (tied.empty()) {
      tied.push_back(static_cast<int>(k));
      continue;
    }
    const int cur = tied.front();
    if (score_greater(cnt[k], sizes[k], cnt[cur], sizes[cur])) {
      tied.clear();
      tied.push_back(static_cast<int>(k));
    } else if (score_equal(cnt[k], sizes[k], cnt[cur], sizes[cur])) {
      tied.push_back(static_cast<int>(k));
    }
  }
  if (tied.size() == 1) return tied.front();
  return tied[keyed_below(stream, key_a, key_b, tied.size())];
}

}  // namespace

TrimResult trim(const Graph& g, int k, double multiplier) {
  if (k < 1) throw std::invalid_argument("trim: K must be >= 1");
  if (!(multiplier > 0)) throw std::invalid_argument("trim: multiplier must be positive");
  TrimResult r;
  r.degenerate = g.m() == 0;
  r.threshold = multiplier * k * static_cast<double>(g.degree_sum()) / g.n();
  for (int v = 0; v < g.n(); ++v) {
    if (g.degree(v) <= r.threshold)
      r.gamma.push_back(v);
    else
      r.removed.push_back(v);
  }
  return r;
}

DecomposeResult spectral_decompose(const Graph& g, const TrimResult& tr, int k,
                                   std::uint64_t seed, const DecomposeOptions& options) {
  const int ng = static_cast<int>(tr.gamma.size());
  if (ng == 0) throw std::invalid_argument("spectral_decompose: empty gamma");
  if (k < 1 || k > ng)
    throw std::invalid_argument("spectral_decompose: need 1 <= K <= |gamma|");

  const SparseSym a_gamma = SparseSym::from_graph_subset(g, tr.gamma);
  Embedding emb = k_rank_approx(a_gamma, k, options.tol, seed, options.oversampling,
                                options.max_iters, options.threads);

  const double unit = static_cast<double>(g.degree_sum()) /
                      (100.0 * static_cast<double>(g.n()) * g.n());

  // Pair distances are fixed across radii; bucket[v][w] is the smallest
  // integer radius index whose ball contains the pair. One O(ng^2 K) pass
  // then prices every radius at a byte-compare sweep.
  const std::uint32_t bucket_cap = 0xFFFFFFFFu;
  std::vector<std::uint32_t> bucket(static_cast<std::size_t>(ng) * ng);
  std::vector<std::uint32_t> row_max(static_cast<std::size_t>(ng), 1);
  parallel_for(ng, options.threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t v = begin; v < end; ++v) {
      std::uint32_t* row = bucket.data() + static_cast<std::size_t>(v) * ng;
      const auto rv = emb.row(static_cast<int>(v));
      std::uint32_t worst = 1;
      for (int w = 0; w < ng; ++w) {
        const double d2 = sq_dist(rv, emb.row(w));
        std::uint32_t b = 1;
        if (unit > 0 && d2 > 0) {
          const double idx = std::ceil(d2 / unit);
          b = idx >= static_cast<double>(bucket_cap)
                  ? bucket_cap
                  : std::max<std::uint32_t>(1, static_cast<std::uint32_t>(idx));
        }
        row[w] = b;
        worst = std::max(worst, b);
      }
      row_max[v] = worst;
    }
  });
  std::int64_t max_bucket = 1;
  for (std::uint32_t m : row_max) max_bucket = std::max<std::int64_t>(max_bucket, m);

  const std::vector<std::int64_t> grid =
      options.radius_count > 0
          ? [&] {
              std::vector<std::int64_t> g_lit;
              for (int i = 1; i <= options.radius_count; ++i) g_lit.push_back(i);
              return g_lit;
            }()
          : radius_grid(std::max(default_rounds(g.n()), 50), max_bucket);

  const int words = (ng + 63) / 64;
  std::vector<std::uint64_t> balls(static_cast<std::size_t>(ng) * words);
  std::vector<std::uint64_t> taken(static_cast<std::size_t>(words));
  std::vector<int> leftover_choice(static_cast<std::size_t>(ng));

  DecompositionTrace trace;
  trace.records.reserve(grid.size());

  for (const std::int64_t i : grid) {
    RadiusRecord rec;
    rec.radius_index = i;
    rec.radius = static_cast<double>(i) * unit;

    // Q_{i,v}: every w whose embedded row lies within the squared radius.
    // Each worker owns whole rows, so construction is race-free and
    // thread-count independent.
    const std::uint64_t limit =
        static_cast<std::uint64_t>(std::min<std::int64_t>(i, bucket_cap));
    parallel_for(ng, options.threads, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t v = begin; v < end; ++v) {
        std::uint64_t* row = balls.data() + static_cast<std::size_t>(v) * words;
        std::memset(row, 0, static_cast<std::size_t>(words) * 8);
        const std::uint32_t* brow = bucket.data() + static_cast<std::size_t>(v) * ng;
        for (int w = 0; w < ng; ++w)
          if (brow[w] <= limit) row[w >> 6] |= std::uint64_t{1} << (w & 63);
      }
    });

    std::fill(taken.begin(), taken.end(), 0);
    rec.centers.assign(static_cast<std::size_t>(k), -1);
    rec.core_sizes.assign(static_cast<std::size_t>(k), 0);
    rec.clusters.assign(static_cast<std::size_t>(k), {});
    rec.xi.assign(static_cast<std::size_t>(k), {});

    // Greedy peeling: center = argmax |Q_v \ taken| (lowest index on ties).
    for (int c = 0; c < k; ++c) {
      struct Best {
        std::int64_t count = -1;
        int v = -1;
      };
      const int chunks = std::max(1, std::min(options.threads, ng));
      std::vector<Best> best(static_cast<std::size_t>(chunks));
      const std::int64_t span = (ng + chunks - 1) / chunks;
      parallel_for(chunks, options.threads, [&](std::int64_t cb, std::int64_t ce) {
        for (std::int64_t chunk = cb; chunk < ce; ++chunk) {
          Best local;
          const std::int64_t lo = chunk * span;
          const std::int64_t hi = std::min<std::int64_t>(lo + span, ng);
          for (std::int64_t v = lo; v < hi; ++v) {
            const std::uint64_t* row = balls.data() + static_cast<std::size_t>(v) * words;
            std::int64_t cnt = 0;
            for (int w = 0; w < words; ++w) cnt += std::popcount(row[w] & ~taken[w]);
            if (cnt > local.count) local = {cnt, static_cast<int>(v)};
          }
          best[chunk] = local;
        }
      });
      Best global;
      for (const Best& cand : best)
        if (cand.count > global.count || (cand.count == global.count && cand.v >= 0 &&
                                          (global.v < 0 || cand.v < global.v)))
          global = cand;
      if (global.count <= 0) break;  // everything taken; remaining clusters stay empty

      rec.centers[c] = global.v;
      const std::uint64_t* row = balls.data() + static_cast<std::size_t>(global.v) * words;
      auto& members = rec.clusters[c];
      for (int w = 0; w < words; ++w) {
        std::uint64_t bits = row[w] & ~taken[w];
        while (bits) {
          const int b = std::countr_zero(bits);
          members.push_back(w * 64 + b);
          bits &= bits - 1;
        }
        taken[w] |= row[w];
      }
      rec.core_sizes[c] = static_cast<int>(members.size());
      std::vector<double> mean(static_cast<std::size_t>(k), 0.0);
      for (int v : members) {
        const auto rv = emb.row(v);
        for (int j = 0; j < k; ++j) mean[j] += rv[j];
      }
      for (double& x : mean) x /= static_cast<double>(members.size());
      rec.xi[c] = std::move(mean);
    }

    // Leftovers go to the nearest center mean (lowest index on ties).
    parallel_for(ng, options.threads, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t v = begin; v < end; ++v) {
        if (taken[v >> 6] >> (v & 63) & 1) {
          leftover_choice[v] = -1;
          continue;
        }
        const auto rv = emb.row(static_cast<int>(v));
        int bestc = -1;
        double bestd = 0;
        for (int c = 0; c < k; ++c) {
          if (rec.xi[c].empty()) continue;
          const double d = sq_dist(rv, {rec.xi[c].data(), rec.xi[c].size()});
          if (bestc < 0 || d < bestd) {
            bestc = c;
            bestd = d;
          }
        }
        leftover_choice[v] = bestc;
      }
    });
    for (int v = 0; v < ng; ++v)
      if (leftover_choice[v] >= 0) rec.clusters[leftover_choice[v]].push_back(v);

    double residual = 0;
    for (int c = 0; c < k; ++c)
      for (int v : rec.clusters[c])
        residual += sq_dist(emb.row(v), {rec.xi[c].data(), rec.xi[c].size()});
    rec.residual = residual;
    trace.records.push_back(std::move(rec));
  }

  trace.chosen = 0;
  for (std::size_t i = 1; i < trace.records.size(); ++i)
    if (trace.records[i].residual < trace.records[trace.chosen].residual)
      trace.chosen = static_cast<int>(i);

  std::vector<int> labels(static_cast<std::size_t>(ng), 0);
  const RadiusRecord& sel = trace.records[trace.chosen];
  for (int c = 0; c < k; ++c)
    for (int v : sel.clusters[c]) labels[v] = c;

  trace.embedding = std::move(emb);
  return {Partition(k, std::move(labels)), std::move(trace)};
}

ImproveResult improve(const Graph& g, const Partition& initial, int iterations,
                      std::uint64_t seed, int first_round, int threads) {
  if (initial.n() != g.n())
    throw std::invalid_argument("improve: partition does not cover the graph");
  if (iterations < 1) throw std::invalid_argument("improve: iterations must be >= 1");
  if (first_round < 0) throw std::invalid_argument("improve: negative first_round");

  const int n = g.n();
  const int k = initial.k();
  const std::uint64_t stream = derive(seed, kTagImprove);

  std::vector<int> prev = initial.labels();
  std::vector<int> next(static_cast<std::size_t>(n));
  std::vector<int> sizes = initial.community_sizes();
  std::vector<int> deltas;
  deltas.reserve(static_cast<std::size_t>(iterations));

  for (int r = 0; r < iterations; ++r) {
    const std::uint64_t round_key = static_cast<std::uint64_t>(first_round + r);
    parallel_for(n, threads, [&](std::int64_t begin, std::int64_t end) {
      std::vector<std::int64_t> cnt(static_cast<std::size_t>(k));
      std::vector<int> tied;
      tied.reserve(static_cast<std::size_t>(k));
      for (std::int64_t v = begin; v < end; ++v) {
        std::fill(cnt.begin(), cnt.end(), 0);
        for (int w : g.neighbors(static_cast<int>(v))) ++cnt[prev[w]];
        next[v] = pick_best_community(cnt, sizes, tied, stream, round_key,
                                      static_cast<std::uint64_t>(v));
      }
    });
    int changed = 0;
    for (int v = 0; v < n; ++v)
      if (next[v] != prev[v]) ++changed;
    deltas.push_back(changed);
    prev.swap(next);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (int v = 0; v < n; ++v) ++sizes[prev[v]];
  }

  return {Partition(k, std::move(prev)), std::move(deltas)};
}

DetectionResult spectral_partition(const Graph& g, int k, const DetectConfig& config) {
  if (k < 2) throw std::invalid_argument("spectral_partition: K must be >= 2");
  if (g.n() < 1) throw std::invalid_argument("spectral_partition: empty graph");
  if (config.truth && (config.truth->n() != g.n() || config.truth->k() != k))
    throw std::invalid_argument("spectral_partition: truth shape mismatch");

  TrimResult tr = trim(g, k, config.trim_multiplier);
  DecomposeOptions dopt;
  dopt.tol = config.tol;
  dopt.oversampling = config.oversampling;
  dopt.max_iters = config.max_iters;
  dopt.radius_count = config.radius_count;
  dopt.threads = config.threads;
  DecomposeResult dec = spectral_decompose(g, tr, k, config.seed, dopt);

  // Trimmed vertices enter with the improvement scoring rule applied against
  // the spectral clusters, synchronously, before round 1.
  std::vector<int> full(static_cast<std::size_t>(g.n()), -1);
  for (std::size_t i = 0; i < tr.gamma.size(); ++i)
    full[tr.gamma[i]] = dec.partition.label(static_cast<int>(i));
  if (!tr.removed.empty()) {
    std::vector<int> sizes = dec.partition.community_sizes();
    const std::uint64_t stream = derive(config.seed, kTagAssign);
    const std::int64_t nr = static_cast<std::int64_t>(tr.removed.size());
    std::vector<int> assigned(static_cast<std::size_t>(nr));
    parallel_for(nr, config.threads, [&](std::int64_t begin, std::int64_t end) {
      std::vector<std::int64_t> cnt(static_cast<std::size_t>(k));
      std::vector<int> tied;
      tied.reserve(static_cast<std::size_t>(k));
      for (std::int64_t i = begin; i < end; ++i) {
        const int v = tr.removed[i];
        std::fill(cnt.begin(), cnt.end(), 0);
        for (int w : g.neighbors(v))
          if (full[w] >= 0) ++cnt[full[w]];
        assigned[i] = pick_best_community(cnt, sizes, tied, stream, 0,
                                          static_cast<std::uint64_t>(v));
      }
    });
    for (std::int64_t i = 0; i < nr; ++i) full[tr.removed[i]] = assigned[i];
  }
  Partition initial(k, std::move(full));

  const int rounds = config.improve_iterations > 0 ? config.improve_iterations
                                                   : default_rounds(g.n());
  ImproveResult imp = improve(g, initial, rounds, config.seed, 0, config.threads);

  DetectionResult result{std::move(imp.partition), std::move(dec.trace),
                         std::move(imp.deltas),    {},
                         tr.degenerate,            static_cast<int>(tr.removed.size()),
                         rounds};
  if (config.truth) {
    result.stage_misclassified = {
        misclassified(dec.partition, config.truth->restrict(tr.gamma)),
        misclassified(initial, *config.truth),
        misclassified(result.estimate, *config.truth)};
  }
  return result;
}

}  // namespace sbm
