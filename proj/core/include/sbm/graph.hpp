#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sbm {

// Undirected simple graph, CSR adjacency, immutable after construction.
class Graph {
 public:
  // Edges as unordered pairs; either orientation accepted. Rejects
  // self-loops, duplicates and out-of-range endpoints.
  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int n() const noexcept { return n_; }
  std::int64_t m() const noexcept { return static_cast<std::int64_t>(adj_.size()) / 2; }
  // Sum of all degrees == 2m (the sum of A over ordered pairs).
  std::int64_t degree_sum() const noexcept { return static_cast<std::int64_t>(adj_.size()); }

  int degree(int v) const { return static_cast<int>(offsets_[v + 1] - offsets_[v]); }

  std::span<const int> neighbors(int v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }

  double average_degree() const noexcept {
    return n_ == 0 ? 0.0 : static_cast<double>(degree_sum()) / n_;
  }

  int max_degree() const;

  // Lexicographic (u < v) edge enumeration, e.g. for serialization.
  std::vector<std::pair<int, int>> edges() const;

 private:
  Graph() = default;
  int n_ = 0;
  std::vector<std::int64_t> offsets_;
  std::vector<int> adj_;  // sorted within each row
};

// Text format: first line "n m", then m lines "u v", 0-based, u < v.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(const Graph& g, std::ostream& out);
void write_edge_list_file(const Graph& g, const std::string& path);

// File open/write failures.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sbm
