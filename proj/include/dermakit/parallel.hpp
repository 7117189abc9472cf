#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace dermakit {

namespace detail {
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{0};  // 0 = hardware concurrency
  return cap;
}
}  // namespace detail

inline void set_max_threads(int n) { detail::thread_cap().store(n); }

inline int max_threads() {
  int cap = detail::thread_cap().load();
  if (cap > 0) return cap;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs f(begin, end) over contiguous chunks of [0, n). Callers must only
/// write to disjoint output slices indexed by the range; all reductions
/// inside a chunk run in ascending index order, so results never depend
/// on the worker count.
template <typename F>
void parallel_for(std::int64_t n, F&& f, std::int64_t grain = 256) {
  if (n <= 0) return;
  int workers = max_threads();
  if (workers > n) workers = static_cast<int>(n);
  if (workers <= 1 || n < 2 * grain) {
    f(std::int64_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  const std::int64_t chunk = (n + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    const std::int64_t begin = t * chunk;
    const std::int64_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&f, begin, end] { f(begin, end); });
  }
  for (auto& th : threads) th.join();
}

}  // namespace dermakit
