#include <benchmark/benchmark.h>

#include <cmath>

#include "sbm/detect.hpp"
#include "sbm/generate.hpp"
#include "sbm/partition.hpp"
#include "sbm/rng.hpp"
#include "sbm/sparse.hpp"
#include "sbm/spectral.hpp"

namespace {

sbm::SbmParams log_params(int n, double a, double b) {
  const double scale = std::log(static_cast<double>(n)) / n;
  return sbm::SbmParams(n, 2, {0.5, 0.5}, a * scale, b * scale);
}

void BM_GenerateSbm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto params = log_params(n, 20, 2);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(sbm::generate_sbm(params, seed++).graph.m());
  state.SetComplexityN(n);
}
BENCHMARK(BM_GenerateSbm)->Arg(500)->Arg(1000)->Arg(2000)->Complexity();

void BM_SparseMatvec(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto inst = sbm::generate_sbm(log_params(n, 20, 2), 7);
  const auto m = sbm::SparseSym::from_graph(inst.graph);
  std::vector<double> x(static_cast<std::size_t>(n), 1.0), y(static_cast<std::size_t>(n));
  for (auto _ : state) {
    m.apply(x, y, static_cast<int>(state.range(1)));
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_SparseMatvec)->Args({2000, 1})->Args({2000, 2})->Args({8000, 1})->Args({8000, 2});

void BM_KRankApprox(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto inst = sbm::generate_sbm(log_params(n, 20, 2), 3);
  const auto m = sbm::SparseSym::from_graph(inst.graph);
  for (auto _ : state)
    benchmark::DoNotOptimize(sbm::k_rank_approx(m, 2, 1e-6, 1).frobenius_err);
}
BENCHMARK(BM_KRankApprox)->Arg(500)->Arg(1000)->Arg(2000);

void BM_SpectralPartition(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto inst = sbm::generate_sbm(log_params(n, 20, 2), 11);
  sbm::DetectConfig cfg;
  cfg.seed = 11;
  cfg.threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const auto det = sbm::spectral_partition(inst.graph, 2, cfg);
    benchmark::DoNotOptimize(det.estimate.label(0));
  }
}
BENCHMARK(BM_SpectralPartition)->Args({600, 1})->Args({600, 2})->Args({2000, 1})->Args({2000, 2})
    ->Unit(benchmark::kMillisecond);

void BM_Misclassified(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int n = 100000;
  sbm::SplitMix64 rng(5);
  std::vector<int> a(n), b(n);
  for (int v = 0; v < n; ++v) {
    a[v] = static_cast<int>(rng.next_below(k));
    b[v] = static_cast<int>(rng.next_below(k));
  }
  const sbm::Partition pa(k, a), pb(k, b);
  for (auto _ : state) benchmark::DoNotOptimize(sbm::misclassified(pa, pb));
}
BENCHMARK(BM_Misclassified)->Arg(2)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
