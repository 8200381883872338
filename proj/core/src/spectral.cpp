#include "sbm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sbm/parallel.hpp"
#include "sbm/rng.hpp"

namespace sbm {

namespace {

double norm2(std::span<const double> x) {
  double sq = 0;
  for (double v : x) sq += v * v;
  return std::sqrt(sq);
}

// Column-major n x b block.
struct Block {
  int n = 0, b = 0;
  std::vector<double> data;
  Block(int n_, int b_) : n(n_), b(b_), data(static_cast<std::size_t>(n_) * b_, 0.0) {}
  double* col(int j) { return data.data() + static_cast<std::size_t>(j) * n; }
  const double* col(int j) const { return data.data() + static_cast<std::size_t>(j) * n; }
};

void fill_gaussian(Block& blk, SplitMix64& rng) {
  for (double& v : blk.data) v = rng.next_gaussian();
}

// Modified Gram-Schmidt with a second pass; rank-deficient columns are
// replaced by fresh gaussian draws from the same stream and re-orthogonalized.
void orthonormalize(Block& q, SplitMix64& rng) {
  for (int j = 0; j < q.b; ++j) {
    double* cj = q.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < j; ++i) {
        const double* ci = q.col(i);
        double dot = 0;
        for (int r = 0; r < q.n; ++r) dot += ci[r] * cj[r];
        for (int r = 0; r < q.n; ++r) cj[r] -= dot * ci[r];
      }
    }
    double nrm = norm2({cj, static_cast<std::size_t>(q.n)});
    int guard = 0;
    while (nrm < 1e-12 && guard++ < 64) {
      for (int r = 0; r < q.n; ++r) cj[r] = rng.next_gaussian();
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < j; ++i) {
          const double* ci = q.col(i);
          double dot = 0;
          for (int r = 0; r < q.n; ++r) dot += ci[r] * cj[r];
          for (int r = 0; r < q.n; ++r) cj[r] -= dot * ci[r];
        }
      }
      nrm = norm2({cj, static_cast<std::size_t>(q.n)});
    }
    for (int r = 0; r < q.n; ++r) cj[r] /= nrm;
  }
}

// Cyclic Jacobi for the small b x b Rayleigh-Ritz matrix. Returns
// eigenvalues in `values` and accumulates rotations into `vectors`
// (column-major, column j = eigenvector j).
void jacobi_eigen(std::vector<double> s, int b, std::vector<double>& values,
                  std::vector<double>& vectors) {
  vectors.assign(static_cast<std::size_t>(b) * b, 0.0);
  for (int i = 0; i < b; ++i) vectors[static_cast<std::size_t>(i) * b + i] = 1.0;
  auto at = [&](int i, int j) -> double& { return s[static_cast<std::size_t>(i) * b + j]; };
  double frob = 0;
  for (double v : s) frob += v * v;
  const double stop = std::max(frob, 1e-300) * 1e-30;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int i = 0; i < b; ++i)
      for (int j = i + 1; j < b; ++j) off += 2 * at(i, j) * at(i, j);
    if (off <= stop) break;
    for (int pp = 0; pp < b - 1; ++pp) {
      for (int qq = pp + 1; qq < b; ++qq) {
        const double apq = at(pp, qq);
        if (apq == 0.0) continue;
        const double theta = (at(qq, qq) - at(pp, pp)) / (2 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1.0 / std::sqrt(t * t + 1);
        const double sn = t * c;
        for (int r = 0; r < b; ++r) {
          const double arp = at(r, pp), arq = at(r, qq);
          at(r, pp) = c * arp - sn * arq;
          at(r, qq) = sn * arp + c * arq;
        }
        for (int r = 0; r < b; ++r) {
          const double apr = at(pp, r), aqr = at(qq, r);
          at(pp, r) = c * apr - sn * aqr;
          at(qq, r) = sn * apr + c * aqr;
        }
        for (int r = 0; r < b; ++r) {
          double& vp = vectors[static_cast<std::size_t>(pp) * b + r];
          double& vq = vectors[static_cast<std::size_t>(qq) * b + r];
          const double tp = vp, tq = vq;
          vp = c * tp - sn * tq;
          vq = sn * tp + c * tq;
        }
      }
    }
  }
  values.resize(static_cast<std::size_t>(b));
  for (int i = 0; i < b; ++i) values[i] = at(i, i);
}

int iteration_cap(double tol, int max_iters) {
  if (max_iters > 0) return max_iters;
  const double t = std::clamp(tol, 1e-15, 0.5);
  return std::max(30, static_cast<int>(std::ceil(25.0 * std::log(1.0 / t))));
}

}  // namespace

double spectral_norm(const SymOp& m, double tol, int max_iters, std::uint64_t seed,
                     int threads) {
  if (m.dim() < 1) throw std::invalid_argument("spectral_norm: empty operator");
  if (!(tol > 0)) throw std::invalid_argument("spectral_norm: tol must be positive");
  const int n = m.dim();
  std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
  SplitMix64 rng(derive(seed, kTagNorm));
  for (double& v : x) v = rng.next_gaussian();
  {
    const double nx = norm2(x);
    for (double& v : x) v /= nx;
  }
  double prev = 0;
  for (int it = 0; it < max_iters; ++it) {
    m.apply(x, y, threads);
    const double sigma = norm2(y);
    if (sigma == 0.0) return 0.0;  // zero matrix (or an exact kernel start)
    for (int r = 0; r < n; ++r) x[r] = y[r] / sigma;
    if (it >= 4 && std::abs(sigma - prev) <= tol * sigma) return sigma;
    prev = sigma;
  }
  throw ConvergenceError("spectral_norm: no convergence within max_iters", prev);
}

Embedding k_rank_approx(const SymOp& m, int k, double tol, std::uint64_t seed,
                        int oversampling, int max_iters, int threads) {
  const int n = m.dim();
  if (k < 1 || k > n)
    throw std::invalid_argument("k_rank_approx: need 1 <= K <= n");
  if (oversampling < 0)
    throw std::invalid_argument("k_rank_approx: negative oversampling");

  Embedding emb;
  emb.k = k;
  emb.rows.assign(static_cast<std::size_t>(n) * k, 0.0);
  emb.spectrum.assign(static_cast<std::size_t>(k), 0.0);

  const double frob = m.frobenius_norm();
  if (frob == 0.0) {
    emb.frobenius_err = 0.0;
    return emb;
  }

  const int b = std::min(n, k + oversampling);
  SplitMix64 rng(derive(seed, kTagSpectral));
  Block q(n, b), z(n, b);
  fill_gaussian(q, rng);
  orthonormalize(q, rng);

  const int cap = iteration_cap(tol, max_iters);
  // Energy stagnation budget: the contract bounds the Frobenius error at
  // (1+tol) of optimal, and err^2 = ||M||_F^2 - energy, so an energy
  // increment small against tol * err^2 cannot move the error past the
  // contract. The absolute floor handles (near-)exact representations.
  const double floor_stag = std::max(frob * frob * 1e-14, 1e-300);

  std::vector<double> ritz_values, ritz_vectors, small(static_cast<std::size_t>(b) * b);
  std::vector<int> order(static_cast<std::size_t>(b));
  double energy_prev = -1;
  int calm = 0;
  bool converged = false;

  for (int it = 0; it < cap; ++it) {
    for (int j = 0; j < b; ++j)
      m.apply({q.col(j), static_cast<std::size_t>(n)},
              {z.col(j), static_cast<std::size_t>(n)}, threads);
    // Rayleigh-Ritz on the current basis: S = Q^T (M Q), symmetrized.
    for (int i = 0; i < b; ++i) {
      for (int j = i; j < b; ++j) {
        double dot = 0;
        const double* ci = q.col(i);
        const double* cj = z.col(j);
        for (int r = 0; r < n; ++r) dot += ci[r] * cj[r];
        small[static_cast<std::size_t>(i) * b + j] = dot;
        small[static_cast<std::size_t>(j) * b + i] = dot;
      }
    }
    jacobi_eigen(small, b, ritz_values, ritz_vectors);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
      return std::abs(ritz_values[lhs]) > std::abs(ritz_values[rhs]);
    });
    double energy = 0;
    for (int j = 0; j < k; ++j) energy += ritz_values[order[j]] * ritz_values[order[j]];
    const double residual_sq = std::max(frob * frob - energy, 0.0);
    const double stagnation =
        std::max(floor_stag, 0.1 * std::clamp(tol, 1e-15, 0.5) * residual_sq);
    if (energy_prev >= 0 && std::abs(energy - energy_prev) <= stagnation) {
      if (++calm >= 3) {
        converged = true;
      }
    } else {
      calm = 0;
    }
    energy_prev = energy;
    if (converged || it == cap - 1) {
      // Assemble coordinates y = (Q W_k) diag(theta) from the latest basis.
      for (int j = 0; j < k; ++j) {
        const int col = order[j];
        const double theta = ritz_values[col];
        emb.spectrum[j] = theta;
        const double* w = ritz_vectors.data() + static_cast<std::size_t>(col) * b;
        for (int r = 0; r < n; ++r) {
          double coord = 0;
          for (int i = 0; i < b; ++i) coord += q.col(i)[r] * w[i];
          emb.rows[static_cast<std::size_t>(r) * k + j] = coord * theta;
        }
      }
      double energy_k = 0;
      for (int j = 0; j < k; ++j) energy_k += emb.spectrum[j] * emb.spectrum[j];
      // Gaps within a few ulps of ||M||_F^2 are roundoff, not residual; the
      // sqrt would otherwise inflate them to ~1e-8 on exactly-representable
      // inputs.
      double gap = frob * frob - energy_k;
      if (gap <= 64 * std::numeric_limits<double>::epsilon() * frob * frob) gap = 0.0;
      emb.frobenius_err = std::sqrt(std::max(gap, 0.0));
      if (converged || b == n) return emb;  // full basis is exact in one pass
      throw ConvergenceError("k_rank_approx: energy still moving at iteration cap",
                             emb.frobenius_err);
    }
    std::swap(q.data, z.data);
    orthonormalize(q, rng);
  }
  throw ConvergenceError("k_rank_approx: unreachable", 0.0);
}

}  // namespace sbm
