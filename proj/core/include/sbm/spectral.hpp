#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sbm/sparse.hpp"

namespace sbm {

struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double estimate)
      : std::runtime_error(what), last_estimate(estimate) {}
  double last_estimate;
};

// Spectral norm by power iteration with a seeded gaussian start. Returns a
// value within tol * ||M|| of ||M|| with high probability; exactly 0 for the
// zero matrix. Throws ConvergenceError (carrying the last iterate's estimate)
// when the relative change has not dropped below tol within max_iters.
double spectral_norm(const SymOp& m, double tol = 1e-6, int max_iters = 1000,
                     std::uint64_t seed = 0, int threads = 1);

// Rank-k factor of the best rank-k Frobenius approximation. row(v) holds
// coordinates y_v with <y_u - y_v, y_u - y_v> equal to the squared distance
// between rows u and v of the represented n x n matrix.
struct Embedding {
  int k = 0;
  std::vector<double> rows;      // dim x k, row-major
  std::vector<double> spectrum;  // k Ritz values, descending |value|
  double frobenius_err = 0;      // ||M - represented||_F

  int dim() const noexcept { return k == 0 ? 0 : static_cast<int>(rows.size()) / k; }
  std::span<const double> row(int v) const {
    return {rows.data() + static_cast<std::size_t>(v) * k, static_cast<std::size_t>(k)};
  }
};

// Randomized subspace iteration with oversampling; keeps the k Ritz pairs of
// largest |value| (descending |value|, then ascending index on ties).
// Iteration cap is derived from tol when max_iters = 0; exits early once the
// captured spectral energy stagnates. Deterministic given seed for any
// thread count.
Embedding k_rank_approx(const SymOp& m, int k, double tol = 1e-6,
                        std::uint64_t seed = 0, int oversampling = 8,
                        int max_iters = 0, int threads = 1);

}  // namespace sbm
