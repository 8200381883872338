#include "sbm/partition.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "sbm/graph.hpp"

namespace sbm {

Partition::Partition(int k, std::vector<int> labels) : k_(k), labels_(std::move(labels)) {
  if (k_ < 1) throw std::invalid_argument("Partition: K must be >= 1");
  for (int l : labels_)
    if (l < 0 || l >= k_)
      throw std::invalid_argument("Partition: label out of range [0, K)");
}

std::vector<int> Partition::community_sizes() const {
  std::vector<int> sizes(k_, 0);
  for (int l : labels_) ++sizes[l];
  return sizes;
}

Partition Partition::restrict(const std::vector<int>& vertices) const {
  std::vector<int> sub;
  sub.reserve(vertices.size());
  for (int v : vertices) sub.push_back(labels_.at(v));
  return Partition(k_, std::move(sub));
}

namespace detail {

std::vector<std::int64_t> confusion(const Partition& estimate, const Partition& truth) {
  const int k = truth.k();
  std::vector<std::int64_t> c(static_cast<std::size_t>(k) * k, 0);
  for (int v = 0; v < truth.n(); ++v)
    ++c[static_cast<std::size_t>(truth.label(v)) * k + estimate.label(v)];
  return c;
}

std::int64_t max_agreement_exhaustive(const std::vector<std::int64_t>& c, int k) {
  std::vector<int> sigma(k);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  do {
    std::int64_t agree = 0;
    for (int t = 0; t < k; ++t) agree += c[static_cast<std::size_t>(t) * k + sigma[t]];
    best = std::max(best, agree);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return best;
}

// Hungarian algorithm (potentials form) on cost = max_entry - C.
std::int64_t max_agreement_hungarian(const std::vector<std::int64_t>& c, int k) {
  const std::int64_t top = *std::max_element(c.begin(), c.end());
  auto cost = [&](int i, int j) { return top - c[static_cast<std::size_t>(i) * k + j]; };
  const std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(k + 1, 0), v(k + 1, 0), minv(k + 1);
  std::vector<int> match(k + 1, 0), way(k + 1, 0);
  for (int i = 1; i <= k; ++i) {
    match[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      std::int64_t delta = inf;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::int64_t agree = 0;
  for (int j = 1; j <= k; ++j)
    agree += c[static_cast<std::size_t>(match[j] - 1) * k + (j - 1)];
  return agree;
}

}  // namespace detail

int misclassified(const Partition& estimate, const Partition& truth) {
  if (estimate.n() != truth.n())
    throw std::invalid_argument("misclassified: partitions cover different n");
  if (estimate.k() != truth.k())
    throw std::invalid_argument("misclassified: partitions have different K");
  const int k = truth.k();
  const auto c = detail::confusion(estimate, truth);
  const std::int64_t agree = k <= 8 ? detail::max_agreement_exhaustive(c, k)
                                    : detail::max_agreement_hungarian(c, k);
  return static_cast<int>(truth.n() - agree);
}

Partition read_partition(std::istream& in, int k) {
  std::vector<int> labels;
  int x = 0;
  while (in >> x) labels.push_back(x);
  if (labels.empty()) throw std::invalid_argument("partition file: empty");
  if (k == 0) k = *std::max_element(labels.begin(), labels.end()) + 1;
  return Partition(k, std::move(labels));
}

Partition read_partition_file(const std::string& path, int k) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_partition(in, k);
}

void write_partition(const Partition& p, std::ostream& out) {
  for (int v = 0; v < p.n(); ++v) out << p.label(v) << '\n';
}

void write_partition_file(const Partition& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_partition(p, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace sbm
