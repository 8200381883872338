#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sbm/generate.hpp"
#include "sbm/oracle.hpp"
#include "sbm/rng.hpp"
#include "sbm/sparse.hpp"
#include "sbm/spectral.hpp"
#include "test_util.hpp"

using namespace sbm;

namespace {

SparseSym all_ones(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) t.push_back({i, j, 1.0});
  return SparseSym::from_triplets(n, t);
}

SparseSym identity(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return SparseSym::from_triplets(n, t);
}

SparseSym scaled(const SparseSym& m, double c) {
  std::vector<Triplet> t;
  m.for_each_entry([&](int i, int j, double v) {
    if (i <= j) t.push_back({i, j, c * v});
  });
  return SparseSym::from_triplets(m.dim(), t);
}

}  // namespace

TEST_CASE("SparseSym: construction and matvec against the dense form") {
  CHECK_THROWS_AS(SparseSym::from_triplets(2, std::vector<Triplet>{{1, 0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      SparseSym::from_triplets(2, std::vector<Triplet>{{0, 1, 1.0}, {0, 1, 2.0}}),
      std::invalid_argument);

  const auto m = test::random_sparse_sym(30, 0.3, 3);
  const auto dense = m.dense();
  SplitMix64 rng(4);
  std::vector<double> x(30), y(30), yref(30, 0.0);
  for (double& v : x) v = rng.next_gaussian();
  m.apply(x, y);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) yref[i] += dense[static_cast<std::size_t>(i) * 30 + j] * x[j];
  for (int i = 0; i < 30; ++i) CHECK(y[i] == doctest::Approx(yref[i]).epsilon(1e-12));

  // Bitwise thread-count independence.
  std::vector<double> y3(30);
  m.apply(x, y3, 3);
  CHECK(y == y3);

  double fr = 0;
  for (double v : dense) fr += v * v;
  CHECK(m.frobenius_norm() == doctest::Approx(std::sqrt(fr)).epsilon(1e-12));
}

TEST_CASE("SparseSym::from_graph_subset extracts the principal submatrix") {
  const auto [g, truth] = test::disjoint_cliques({3, 2});
  const std::vector<int> keep{0, 1, 3, 4};
  const auto sub = SparseSym::from_graph_subset(g, keep);
  const auto d = sub.dense();
  CHECK(sub.dim() == 4);
  CHECK(d[0 * 4 + 1] == 1.0);  // 0-1 edge survives
  CHECK(d[2 * 4 + 3] == 1.0);  // 3-4 edge survives
  CHECK(d[0 * 4 + 2] == 0.0);
  CHECK(sub.nnz() == 4);
}

TEST_CASE("spectral_norm: closed forms") {
  CHECK(spectral_norm(all_ones(4), 1e-10, 1000) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(spectral_norm(identity(5), 1e-10, 1000) == doctest::Approx(1.0).epsilon(1e-10));
  const auto zero = SparseSym::from_triplets(6, std::vector<Triplet>{});
  CHECK(spectral_norm(zero, 1e-8, 100) == 0.0);
}

TEST_CASE("spectral_norm matches the dense oracle on random matrices") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto m = test::random_sparse_sym(30, 0.35, 100 + seed);
    const double reference = test::oracle_spectral_norm(m);
    const double got = spectral_norm(m, 1e-12, 50000, seed);
    CHECK(got == doctest::Approx(reference).epsilon(1e-8));
  }
}

TEST_CASE("spectral_norm: homogeneity under scaling") {
  const auto m = test::random_sparse_sym(25, 0.4, 21);
  const double base = spectral_norm(m, 1e-11, 50000);
  for (double c : {-2.5, 0.5, 3.0, -0.125}) {
    CHECK(spectral_norm(scaled(m, c), 1e-11, 50000) ==
          doctest::Approx(std::abs(c) * base).epsilon(1e-6));
  }
}

TEST_CASE("spectral_norm: convergence error carries the last estimate") {
  const auto m = test::random_sparse_sym(30, 0.35, 9);
  try {
    spectral_norm(m, 1e-15, 3);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_estimate >= 0.0);
    CHECK(e.last_estimate <= 1.01 * test::oracle_spectral_norm(m));
  }
}

TEST_CASE("k_rank_approx: exact cases") {
  // Rank-1 outer product u u^T, K = 1.
  const std::vector<double> u{1.0, 2.0, 0.0, -1.0, 0.5};
  std::vector<Triplet> t;
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j) t.push_back({i, j, u[i] * u[j]});
  const auto rank1 = SparseSym::from_triplets(5, t);
  const auto e1 = k_rank_approx(rank1, 1, 1e-10, 42);
  CHECK(e1.frobenius_err <= 1e-10);

  // Identity, K = n: nothing truncated.
  const auto efull = k_rank_approx(identity(5), 5, 1e-10, 42);
  CHECK(efull.frobenius_err <= 1e-12);

  CHECK_THROWS_AS(k_rank_approx(identity(5), 6, 1e-8, 1), std::invalid_argument);
  CHECK_THROWS_AS(k_rank_approx(identity(5), 0, 1e-8, 1), std::invalid_argument);

  // Zero matrix: zero embedding, zero error.
  const auto zero = SparseSym::from_triplets(4, std::vector<Triplet>{});
  const auto ez = k_rank_approx(zero, 2, 1e-8, 1);
  CHECK(ez.frobenius_err == 0.0);
  CHECK(*std::max_element(ez.rows.begin(), ez.rows.end()) == 0.0);
}

TEST_CASE("k_rank_approx matches the dense truncation error") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto m = test::random_sparse_sym(40, 0.4, 300 + seed);
    const auto dec = oracle::dense_eigen(oracle::DenseMatrix::from_sparse(m));
    const auto emb = k_rank_approx(m, 3, 1e-12, seed, 8, 4000);
    CHECK(emb.frobenius_err ==
          doctest::Approx(oracle::truncation_error(dec, 3)).epsilon(1e-8));
    CHECK(std::abs(emb.frobenius_err - oracle::truncation_error(dec, 3)) <= 1e-6);
  }
}

TEST_CASE("k_rank_approx: embedding rows realize represented row distances") {
  // Two cliques of 6: eigenvalues {5, 5, -1 x10}. The rank-2 representation
  // has identical rows within a block and ||row_u - row_v||^2 = 2 * 25/6
  // across blocks; the truncation error is sqrt(10).
  const auto [g, truth] = test::disjoint_cliques({6, 6});
  const auto a = SparseSym::from_graph(g);
  const auto emb = k_rank_approx(a, 2, 1e-12, 5);
  CHECK(emb.frobenius_err == doctest::Approx(std::sqrt(10.0)).epsilon(1e-9));
  auto dist2 = [&](int x, int y) {
    double s = 0;
    for (int j = 0; j < emb.k; ++j) {
      const double d = emb.row(x)[j] - emb.row(y)[j];
      s += d * d;
    }
    return s;
  };
  CHECK(dist2(0, 1) <= 1e-16);
  CHECK(dist2(0, 6) == doctest::Approx(50.0 / 6).epsilon(1e-9));
}

TEST_CASE("k_rank_approx: Eckart-Young monotonicity and norm bound") {
  const auto m = test::random_sparse_sym(35, 0.45, 77);
  const double norm = test::oracle_spectral_norm(m);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 6; ++k) {
    const auto emb = k_rank_approx(m, k, 1e-11, 7, 8, 4000);
    CHECK(emb.frobenius_err <= prev + 1e-9);
    prev = emb.frobenius_err;
    double top = 0;
    for (double v : emb.spectrum) top = std::max(top, std::abs(v));
    CHECK(top <= norm * (1 + 1e-9));
  }
}

TEST_CASE("k_rank_approx: deterministic per seed and across thread counts") {
  const auto m = test::random_sparse_sym(50, 0.2, 13);
  const auto a = k_rank_approx(m, 3, 1e-10, 99, 8, 0, 1);
  const auto b = k_rank_approx(m, 3, 1e-10, 99, 8, 0, 3);
  CHECK(a.rows == b.rows);
  CHECK(a.spectrum == b.spectrum);
  const auto c = k_rank_approx(m, 3, 1e-10, 100, 8, 0, 1);
  CHECK(a.rows != c.rows);  // different seed, different rotation of ties at least
}

TEST_CASE("CenteredSym equals its dense centering") {
  const SbmParams params(40, 2, {0.5, 0.5}, 0.6, 0.2);
  const auto inst = generate_sbm(params, 8);
  auto a = SparseSym::from_graph(inst.graph);
  const auto adense = a.dense();
  const CenteredSym x(std::move(a), inst.truth.labels(), 2, 0.6, 0.2);

  std::vector<double> expect(40 * 40);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) {
      const double e =
          i == j ? 0.0 : (inst.truth.label(i) == inst.truth.label(j) ? 0.6 : 0.2);
      expect[static_cast<std::size_t>(i) * 40 + j] =
          adense[static_cast<std::size_t>(i) * 40 + j] - e;
    }
  SplitMix64 rng(6);
  std::vector<double> v(40), y(40), yref(40, 0.0);
  for (double& t : v) t = rng.next_gaussian();
  x.apply(v, y);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j)
      yref[i] += expect[static_cast<std::size_t>(i) * 40 + j] * v[j];
  for (int i = 0; i < 40; ++i) CHECK(y[i] == doctest::Approx(yref[i]).epsilon(1e-10));

  double fr = 0;
  for (double t : expect) fr += t * t;
  CHECK(x.frobenius_norm() == doctest::Approx(std::sqrt(fr)).epsilon(1e-12));

  std::vector<double> y3(40);
  x.apply(v, y3, 3);
  CHECK(y == y3);
}

TEST_CASE("centered operator norm sits at the sqrt(np) scale" * doctest::timeout(120)) {
  const int n = 500;
  const double ln_n = std::log(static_cast<double>(n));
  const SbmParams params(n, 2, {0.5, 0.5}, 20 * ln_n / n, 2 * ln_n / n);
  const auto inst = generate_sbm(params, 3);
  auto a = SparseSym::from_graph(inst.graph);
  const CenteredSym x(std::move(a), inst.truth.labels(), 2, params.p(), params.q());
  const double norm = spectral_norm(x, 1e-6, 20000, 1);
  const double ratio = norm / std::sqrt(n * params.p());
  CHECK(ratio > 0.3);
  CHECK(ratio < 3.0);
}
