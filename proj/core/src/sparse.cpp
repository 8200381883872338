#include "sbm/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbm/parallel.hpp"

namespace sbm {

SparseSym SparseSym::from_graph(const Graph& g) {
  SparseSym m;
  m.n_ = g.n();
  m.offsets_.assign(static_cast<std::size_t>(g.n()) + 1, 0);
  m.cols_.reserve(static_cast<std::size_t>(g.degree_sum()));
  m.values_.reserve(static_cast<std::size_t>(g.degree_sum()));
  for (int v = 0; v < g.n(); ++v) {
    for (int w : g.neighbors(v)) {
      m.cols_.push_back(w);
      m.values_.push_back(1.0);
    }
    m.offsets_[v + 1] = static_cast<std::int64_t>(m.cols_.size());
  }
  return m;
}

SparseSym SparseSym::from_graph_subset(const Graph& g, std::span<const int> vertices) {
  std::vector<int> local(static_cast<std::size_t>(g.n()), -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const int v = vertices[i];
    if (v < 0 || v >= g.n())
      throw std::invalid_argument("from_graph_subset: vertex out of range");
    if (i > 0 && vertices[i] <= vertices[i - 1])
      throw std::invalid_argument("from_graph_subset: vertices must be ascending");
    local[v] = static_cast<int>(i);
  }
  SparseSym m;
  m.n_ = static_cast<int>(vertices.size());
  m.offsets_.assign(vertices.size() + 1, 0);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (int w : g.neighbors(vertices[i])) {
      if (local[w] < 0) continue;
      m.cols_.push_back(local[w]);
      m.values_.push_back(1.0);
    }
    m.offsets_[i + 1] = static_cast<std::int64_t>(m.cols_.size());
  }
  return m;
}

SparseSym SparseSym::from_triplets(int n, std::span<const Triplet> entries) {
  if (n < 0) throw std::invalid_argument("from_triplets: negative dimension");
  std::vector<std::pair<std::pair<int, int>, double>> full;
  full.reserve(entries.size() * 2);
  for (const auto& t : entries) {
    if (t.row < 0 || t.col < 0 || t.row >= n || t.col >= n)
      throw std::invalid_argument("from_triplets: index out of range");
    if (t.row > t.col)
      throw std::invalid_argument("from_triplets: requires row <= col");
    full.push_back({{t.row, t.col}, t.value});
    if (t.row != t.col) full.push_back({{t.col, t.row}, t.value});
  }
  std::sort(full.begin(), full.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < full.size(); ++i)
    if (full[i].first == full[i - 1].first)
      throw std::invalid_argument("from_triplets: duplicate entry");

  SparseSym m;
  m.n_ = n;
  m.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  m.cols_.reserve(full.size());
  m.values_.reserve(full.size());
  std::size_t idx = 0;
  for (int v = 0; v < n; ++v) {
    while (idx < full.size() && full[idx].first.first == v) {
      m.cols_.push_back(full[idx].first.second);
      m.values_.push_back(full[idx].second);
      ++idx;
    }
    m.offsets_[v + 1] = static_cast<std::int64_t>(m.cols_.size());
  }
  return m;
}

void SparseSym::apply(std::span<const double> x, std::span<double> y, int threads) const {
  if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
    throw std::invalid_argument("SparseSym::apply: size mismatch");
  parallel_for(n_, threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t v = begin; v < end; ++v) {
      double acc = 0;  // fixed per-row summation order keeps results
                       // identical across thread counts
      for (std::int64_t e = offsets_[v]; e < offsets_[v + 1]; ++e)
        acc += values_[e] * x[cols_[e]];
      y[v] = acc;
    }
  });
}

double SparseSym::frobenius_norm() const {
  double sq = 0;
  for (double v : values_) sq += v * v;
  return std::sqrt(sq);
}

std::vector<double> SparseSym::dense() const {
  std::vector<double> a(static_cast<std::size_t>(n_) * n_, 0.0);
  for (int v = 0; v < n_; ++v)
    for (std::int64_t e = offsets_[v]; e < offsets_[v + 1]; ++e)
      a[static_cast<std::size_t>(v) * n_ + cols_[e]] = values_[e];
  return a;
}

CenteredSym::CenteredSym(SparseSym adjacency, std::vector<int> labels, int k,
                         double p, double q)
    : adjacency_(std::move(adjacency)),
      labels_(std::move(labels)),
      k_(k),
      p_(p),
      q_(q) {
  if (static_cast<int>(labels_.size()) != adjacency_.dim())
    throw std::invalid_argument("CenteredSym: labels/dimension mismatch");
  for (int l : labels_)
    if (l < 0 || l >= k_) throw std::invalid_argument("CenteredSym: label out of range");
}

void CenteredSym::apply(std::span<const double> x, std::span<double> y,
                        int threads) const {
  const int n = dim();
  adjacency_.apply(x, y, threads);
  // Block sums are accumulated sequentially in index order so the
  // subtraction below is bit-stable for any thread count.
  std::vector<double> block(static_cast<std::size_t>(k_), 0.0);
  double total = 0;
  for (int v = 0; v < n; ++v) {
    block[labels_[v]] += x[v];
    total += x[v];
  }
  parallel_for(n, threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t v = begin; v < end; ++v) {
      const double same = block[labels_[v]];
      y[v] -= p_ * (same - x[v]) + q_ * (total - same);
    }
  });
}

double CenteredSym::frobenius_norm() const {
  // ||A - E||_F^2 = sum over all off-diagonal positions of E^2, adjusted by
  // (val^2 - 2 val E) at every stored position of A. E_vw is p or q by label
  // agreement, 0 on the diagonal.
  const int n = dim();
  std::vector<std::int64_t> sizes(static_cast<std::size_t>(k_), 0);
  for (int l : labels_) ++sizes[l];
  double same_ordered = 0;
  for (std::int64_t s : sizes) same_ordered += static_cast<double>(s) * (s - 1);
  const double total_ordered = static_cast<double>(n) * (n - 1);
  double sq = p_ * p_ * same_ordered + q_ * q_ * (total_ordered - same_ordered);
  adjacency_.for_each_entry([&](int v, int w, double val) {
    const double e = v == w ? 0.0 : (labels_[v] == labels_[w] ? p_ : q_);
    sq += val * val - 2.0 * val * e;
  });
  return std::sqrt(std::max(sq, 0.0));
}

}  // namespace sbm
