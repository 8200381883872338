#pragma once

#include <vector>

#include "sbm/graph.hpp"
#include "sbm/params.hpp"
#include "sbm/partition.hpp"
#include "sbm/sparse.hpp"

// Brute-force references for tests: exhaustive maximum likelihood, dense
// eigendecomposition, and helpers around them. Nothing here is on the
// detection path; the point is an independent route to the same answers.
namespace sbm::oracle {

struct DenseMatrix {
  int n = 0;
  std::vector<double> a;  // row-major n*n

  static DenseMatrix zero(int n) {
    return {n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  }
  static DenseMatrix from_sparse(const SparseSym& m) { return {m.dim(), m.dense()}; }
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

struct EigenDecomposition {
  int n = 0;
  std::vector<double> values;   // descending
  std::vector<double> vectors;  // column-major: vectors[j*n + i] = Q(i, j)
};

// Classical dense symmetric eigensolve, n <= 200.
EigenDecomposition dense_eigen(const DenseMatrix& m);

// Optimal rank-k Frobenius truncation error: sqrt of the energy outside the
// k eigenvalues of largest magnitude.
double truncation_error(const EigenDecomposition& d, int k);

double reconstruction_error(const EigenDecomposition& d, const DenseMatrix& m);
double orthonormality_defect(const EigenDecomposition& d);  // max |Q^T Q - I|

struct LikelihoodScore {
  double log_likelihood = 0;
  Partition partition;
};

// Enumerates all K^n label vectors (optionally only those with the planted
// community sizes) and returns the maximum-likelihood partition, ties broken
// by lexicographically smallest label vector. Requires n <= 14 and
// 0 < q <= p < 1.
LikelihoodScore mle_exhaustive(const Graph& g, const SbmParams& params,
                               bool size_constrained);

}  // namespace sbm::oracle
