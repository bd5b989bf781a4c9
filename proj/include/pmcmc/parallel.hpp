#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace pmcmc {

// Run fn(i) for i in [0, n) across worker threads. Work is pre-partitioned by
// index so results are deterministic regardless of scheduling; callers hand
// each index its own RngStream.
inline void parallel_for(int n, const std::function<void(int)>& fn,
                         int workers = 0) {
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace pmcmc
