#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace offwhite {

/// Worker count: OFFWHITE_THREADS when set (1 disables threading),
/// otherwise hardware concurrency capped at 8.
inline int thread_budget() {
  if (const char* env = std::getenv("OFFWHITE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(hw == 0 ? 1 : std::min(hw, 8u));
}

/// Run f(i) for i in [0, n). Each index writes only its own slot, so results
/// are identical to the sequential order regardless of scheduling.
template <class F>
void parallel_for(int n, F&& f) {
  const int workers = std::min(thread_budget(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = w; i < n; i += workers) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace offwhite
