#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace sbm {

// Runs fn(begin, end) over contiguous chunks of [0, count) on up to
// `threads` workers. Callers must write disjoint outputs per index; with
// that, results are identical for every thread count.
template <typename Fn>
void parallel_for(std::int64_t count, int threads, Fn&& fn) {
  if (count <= 0) return;
  if (threads <= 1 || count < 2) {
    fn(std::int64_t{0}, count);
    return;
  }
  const int workers = static_cast<int>(
      std::min<std::int64_t>(threads, count));
  const std::int64_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min<std::int64_t>(begin + chunk, count);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace sbm
