#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbm/graph.hpp"

namespace sbm {

// Symmetric linear operator. apply() must be deterministic for any thread
// count (fixed reduction order per output element).
class SymOp {
 public:
  virtual ~SymOp() = default;
  virtual int dim() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y,
                     int threads = 1) const = 0;
  virtual double frobenius_norm() const = 0;
};

struct Triplet {
  int row;  // row <= col; the mirrored entry is implied
  int col;
  double value;
};

// Explicit sparse symmetric matrix, CSR over the full (mirrored) entry set.
class SparseSym : public SymOp {
 public:
  // 0/1 adjacency of g.
  static SparseSym from_graph(const Graph& g);
  // Principal submatrix of the adjacency on `vertices` (ascending),
  // reindexed to 0..|vertices|-1.
  static SparseSym from_graph_subset(const Graph& g, std::span<const int> vertices);
  // Upper-triangle triplets (row <= col), no duplicates; off-diagonal
  // entries are mirrored.
  static SparseSym from_triplets(int n, std::span<const Triplet> entries);

  int dim() const override { return n_; }
  std::int64_t nnz() const noexcept { return static_cast<std::int64_t>(values_.size()); }
  void apply(std::span<const double> x, std::span<double> y,
             int threads = 1) const override;
  double frobenius_norm() const override;

  // Visits every stored entry as fn(row, col, value); both mirrored halves.
  template <typename Fn>
  void for_each_entry(Fn&& fn) const {
    for (int v = 0; v < n_; ++v)
      for (std::int64_t e = offsets_[v]; e < offsets_[v + 1]; ++e)
        fn(v, cols_[e], values_[e]);
  }

  std::vector<double> dense() const;  // row-major n*n; test sizes only

 private:
  SparseSym() = default;
  int n_ = 0;
  std::vector<std::int64_t> offsets_;
  std::vector<int> cols_;
  std::vector<double> values_;
};

// A - E[A] for a planted-partition expectation: E[A]_{vw} = p when
// labels[v] == labels[w] (v != w), q otherwise, 0 on the diagonal. The
// expectation part is applied in O(n + k) per matvec, so the operator never
// materializes the dense centering. Simulation/diagnostic use only: the true
// expectation is not observable.
class CenteredSym : public SymOp {
 public:
  CenteredSym(SparseSym adjacency, std::vector<int> labels, int k, double p, double q);

  int dim() const override { return adjacency_.dim(); }
  void apply(std::span<const double> x, std::span<double> y,
             int threads = 1) const override;
  double frobenius_norm() const override;

 private:
  SparseSym adjacency_;
  std::vector<int> labels_;
  int k_;
  double p_;
  double q_;
};

}  // namespace sbm
