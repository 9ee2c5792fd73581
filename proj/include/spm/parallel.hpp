#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace spm {

inline int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

/// Runs fn(i) for i in [0, count) across `workers` threads. Indices are
/// statically interleaved; each index is processed exactly once, so results
/// written to disjoint locations are independent of the worker count.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  workers = resolve_workers(workers);
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = std::size_t(w); i < count; i += std::size_t(workers)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace spm
