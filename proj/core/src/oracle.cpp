#include "sbm/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbm::oracle {

EigenDecomposition dense_eigen(const DenseMatrix& m) {
  if (m.n < 1 || m.n > 200)
    throw std::invalid_argument("dense_eigen: n must lie in [1, 200]");
  if (m.a.size() != static_cast<std::size_t>(m.n) * m.n)
    throw std::invalid_argument("dense_eigen: bad buffer size");
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      a(m.a.data(), m.n, m.n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  EigenDecomposition d;
  d.n = m.n;
  d.values.resize(static_cast<std::size_t>(m.n));
  d.vectors.resize(static_cast<std::size_t>(m.n) * m.n);
  // Eigen returns ascending; flip to descending.
  for (int j = 0; j < m.n; ++j) {
    const int src = m.n - 1 - j;
    d.values[j] = solver.eigenvalues()(src);
    for (int i = 0; i < m.n; ++i)
      d.vectors[static_cast<std::size_t>(j) * m.n + i] = solver.eigenvectors()(i, src);
  }
  return d;
}

double truncation_error(const EigenDecomposition& d, int k) {
  if (k < 0 || k > d.n) throw std::invalid_argument("truncation_error: bad k");
  std::vector<double> mags(d.values.size());
  for (std::size_t i = 0; i < d.values.size(); ++i) mags[i] = std::abs(d.values[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double sq = 0;
  for (int i = k; i < d.n; ++i) sq += mags[i] * mags[i];
  return std::sqrt(sq);
}

double reconstruction_error(const EigenDecomposition& d, const DenseMatrix& m) {
  double sq = 0;
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.n; ++j) {
      double rec = 0;
      for (int t = 0; t < d.n; ++t)
        rec += d.values[t] * d.vectors[static_cast<std::size_t>(t) * d.n + i] *
               d.vectors[static_cast<std::size_t>(t) * d.n + j];
      const double diff = rec - m.at(i, j);
      sq += diff * diff;
    }
  }
  return std::sqrt(sq);
}

double orthonormality_defect(const EigenDecomposition& d) {
  double worst = 0;
  for (int a = 0; a < d.n; ++a) {
    for (int b = a; b < d.n; ++b) {
      double dot = 0;
      for (int i = 0; i < d.n; ++i)
        dot += d.vectors[static_cast<std::size_t>(a) * d.n + i] *
               d.vectors[static_cast<std::size_t>(b) * d.n + i];
      worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

LikelihoodScore mle_exhaustive(const Graph& g, const SbmParams& params,
                               bool size_constrained) {
  const int n = g.n();
  const int k = params.k();
  if (n > 14) throw std::invalid_argument("mle_exhaustive: refuses n > 14");
  if (n != params.n()) throw std::invalid_argument("mle_exhaustive: n mismatch");
  if (!(params.q() > 0) || !(params.p() < 1))
    throw std::invalid_argument("mle_exhaustive: needs 0 < q <= p < 1");

  const double lp = std::log(params.p());
  const double l1p = std::log1p(-params.p());
  const double lq = std::log(params.q());
  const double l1q = std::log1p(-params.q());

  const auto planted = params.community_sizes();
  const auto edges = g.edges();

  // Per-assignment sufficient statistics; two assignments tie exactly iff
  // their count vectors produce a zero integer combination of the four logs,
  // so comparing via integer deltas makes the lexicographic tie rule exact.
  struct Counts {
    std::int64_t e_same = 0, same_pairs = 0, e_diff = 0, diff_pairs = 0;
  };
  const std::int64_t total_pairs = static_cast<std::int64_t>(n) * (n - 1) / 2;
  const std::int64_t total_edges = g.m();

  auto counts_of = [&](const std::vector<int>& labels) {
    Counts c;
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++sizes[l];
    for (std::int64_t s : sizes) c.same_pairs += s * (s - 1) / 2;
    c.diff_pairs = total_pairs - c.same_pairs;
    for (auto [u, v] : edges)
      if (labels[u] == labels[v]) ++c.e_same;
    c.e_diff = total_edges - c.e_same;
    return c;
  };
  auto loglik = [&](const Counts& c) {
    return c.e_same * lp + (c.same_pairs - c.e_same) * l1p + c.e_diff * lq +
           (c.diff_pairs - c.e_diff) * l1q;
  };
  // Positive iff loglik(a) > loglik(b); exact zero on integer-cancelling ties.
  auto delta = [&](const Counts& a, const Counts& b) {
    return (a.e_same - b.e_same) * lp +
           ((a.same_pairs - a.e_same) - (b.same_pairs - b.e_same)) * l1p +
           (a.e_diff - b.e_diff) * lq +
           ((a.diff_pairs - a.e_diff) - (b.diff_pairs - b.e_diff)) * l1q;
  };

  auto matches_planted = [&](const std::vector<int>& labels) {
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++sizes[l];
    for (int c = 0; c < k; ++c)
      if (sizes[c] != planted[c]) return false;
    return true;
  };

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  bool have_best = false;
  Counts best_counts;
  std::vector<int> best_labels;

  // Odometer with labels[n-1] fastest: visits label vectors in
  // lexicographic order, so the first maximum is the lexicographic minimum.
  while (true) {
    if (!size_constrained || matches_planted(labels)) {
      const Counts c = counts_of(labels);
      if (!have_best || delta(c, best_counts) > 0) {
        have_best = true;
        best_counts = c;
        best_labels = labels;
      }
    }
    int pos = n - 1;
    while (pos >= 0 && labels[pos] == k - 1) labels[pos--] = 0;
    if (pos < 0) break;
    ++labels[pos];
  }
  if (!have_best)
    throw std::invalid_argument("mle_exhaustive: no assignment matches the size constraint");

  return {loglik(best_counts), Partition(k, std::move(best_labels))};
}

}  // namespace sbm::oracle
