#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sbm {

// Assignment of every vertex to one of k communities. Communities may be
// empty (estimated partitions can be degenerate).
class Partition {
 public:
  Partition(int k, std::vector<int> labels);

  int n() const noexcept { return static_cast<int>(labels_.size()); }
  int k() const noexcept { return k_; }
  int label(int v) const { return labels_[v]; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  std::vector<int> community_sizes() const;

  // Restriction to a vertex subset, in subset order.
  Partition restrict(const std::vector<int>& vertices) const;

  bool operator==(const Partition&) const = default;

 private:
  int k_;
  std::vector<int> labels_;
};

// min over label permutations sigma of |{v : estimate(v) != sigma(truth(v))}|.
// Exhaustive over k! for k <= 8, Hungarian assignment on the confusion matrix
// above that. Requires matching n and k.
int misclassified(const Partition& estimate, const Partition& truth);

namespace detail {
// Confusion counts C[t][e] = #{v : truth(v) = t, estimate(v) = e}, flattened
// row-major k x k. Both solvers maximize sum_t C[t][sigma(t)].
std::vector<std::int64_t> confusion(const Partition& estimate, const Partition& truth);
std::int64_t max_agreement_exhaustive(const std::vector<std::int64_t>& c, int k);
std::int64_t max_agreement_hungarian(const std::vector<std::int64_t>& c, int k);
}  // namespace detail

// One label per line, n lines.
Partition read_partition(std::istream& in, int k = 0);  // k = 0: infer max+1
Partition read_partition_file(const std::string& path, int k = 0);
void write_partition(const Partition& p, std::ostream& out);
void write_partition_file(const Partition& p, const std::string& path);

}  // namespace sbm
