#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sbm/detect.hpp"
#include "sbm/generate.hpp"
#include "sbm/harness.hpp"
#include "sbm/oracle.hpp"

// Monte-Carlo regression fixtures at n = 600, binary symmetric, with
// p = a ln n / n, q = b ln n / n. Thresholds are calibration bands, not
// theorems; seeds are fixed so reruns are exact.

using namespace sbm;

namespace {

SbmParams log_params(int n, double a, double b) {
  const double scale = std::log(static_cast<double>(n)) / n;
  return SbmParams(n, 2, {0.5, 0.5}, a * scale, b * scale);
}

}  // namespace

TEST_CASE("supercritical n=600 a=20 b=2: spectral stage and full pipeline" *
          doctest::timeout(300)) {
  const SbmParams params = log_params(600, 20, 2);
  int spectral_ok = 0;
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = generate_sbm(params, seed);
    DetectConfig cfg;
    cfg.seed = seed;
    cfg.truth = &inst.truth;
    const auto det = spectral_partition(inst.graph, 2, cfg);
    REQUIRE(det.stage_misclassified.size() == 3);
    const int gamma_n = 600 - det.trimmed;
    if (det.stage_misclassified[0] <= gamma_n / 10) ++spectral_ok;
    if (det.stage_misclassified[2] == 0) ++exact;
  }
  CHECK(spectral_ok >= 9);  // <= 10% misclassified after the spectral stage
  CHECK(exact >= 9);        // margin (a+b)/2 - sqrt(ab) = 4.68 >> 1
}

TEST_CASE("improvement holds the true partition fixed at high margin" *
          doctest::timeout(300)) {
  // divergence = ln(600) * 4.675 = 29.9 >= 2 ln(600) = 12.8.
  const SbmParams params = log_params(600, 20, 2);
  REQUIRE(divergence(params) >= 2 * std::log(600.0));
  int stable = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto inst = generate_sbm(params, seed);
    const auto res = improve(inst.graph, inst.truth,
                             static_cast<int>(std::ceil(std::log(600.0))), seed);
    if (misclassified(res.partition, inst.truth) == 0) ++stable;
  }
  CHECK(stable >= 18);  // >= 90% of 20 seeds
}

TEST_CASE("subcritical n=600 a=1.1 b=1.0: exact recovery is rare" *
          doctest::timeout(300)) {
  SweepConfig config;
  config.n = 600;
  config.k = 2;
  config.a_grid = {1.1};
  config.b_grid = {1.0};
  config.s = {SSpec::Kind::Exact, 0.0};
  config.trials = 10;
  config.master_seed = 7;
  const CellResult cell = run_cell(config, 0, 0);
  CHECK_FALSE(cell.skipped);
  CHECK(cell.error.empty());
  CHECK(cell.success_rate <= 0.2);
  REQUIRE(cell.predicted_valid);
  CHECK(cell.predicted.eq1_ratio < 0.1);  // margin ~ 0.0045
}

TEST_CASE("empirical 50%-success contour sits inside the threshold band" *
          doctest::timeout(1200)) {
  // With b = 2 fixed, the margin (a+b)/2 - sqrt(ab) = ((sqrt(a)-sqrt(b))^2)/2
  // crosses 1 at a = 8; the margin-[0.5, 1.5] band is a in [5.83, 9.90].
  // The empirical exact-recovery rate must cross 0.5 inside that band.
  SweepConfig config;
  config.n = 2000;
  config.k = 2;
  config.a_grid = {5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0};
  config.b_grid = {2.0};
  config.s = {SSpec::Kind::Exact, 0.0};
  config.trials = 10;
  config.master_seed = 21;
  config.jobs = 2;

  std::vector<double> rates;
  for (std::size_t ai = 0; ai < config.a_grid.size(); ++ai) {
    const auto cell = run_cell(config, ai, 0);
    REQUIRE(cell.error.empty());
    rates.push_back(cell.success_rate);
  }
  std::size_t first_hi = rates.size();
  for (std::size_t ai = 0; ai < rates.size(); ++ai)
    if (rates[ai] >= 0.5) {
      first_hi = ai;
      break;
    }
  auto margin = [](double a) {
    const double d = std::sqrt(a) - std::sqrt(2.0);
    return 0.5 * d * d;
  };
  // The 50% crossing lies between grid point first_hi-1 and first_hi; the
  // contour is inside the band iff margin(left) <= 1.5 and
  // margin(right) >= 0.5.
  REQUIRE(first_hi > 0);             // still below 50% at margin 0.52
  REQUIRE(first_hi < rates.size());  // reaches 50% by margin 1.85
  CHECK(margin(config.a_grid[first_hi]) >= 0.5);
  CHECK(margin(config.a_grid[first_hi - 1]) <= 1.5);
}

TEST_CASE("MLE beats or matches spectral on tiny instances" * doctest::timeout(300)) {
  // Tiny-n stand-in for the supercritical regime: strong signal, n = 10.
  const SbmParams params(10, 2, {0.5, 0.5}, 0.9, 0.1);
  int mle_no_worse = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = generate_sbm(params, seed);
    DetectConfig cfg;
    cfg.seed = seed;
    const auto det = spectral_partition(inst.graph, 2, cfg);
    const int spectral_mis = misclassified(det.estimate, inst.truth);
    const auto mle = oracle::mle_exhaustive(inst.graph, params, true);
    const int mle_mis = misclassified(mle.partition, inst.truth);
    if (mle_mis <= spectral_mis) ++mle_no_worse;
  }
  CHECK(mle_no_worse >= 16);  // >= 80% of 20 seeds
}
