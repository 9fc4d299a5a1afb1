#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace fatou::detail {

/// Runs body(row) for row in [0, rows) on up to hardware_concurrency threads.
/// Rows are independent; results never depend on the thread count.
template <typename Body>
void parallel_rows(int rows, Body&& body) {
  const int threads = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, 64);
  if (threads == 1 || rows < 2 * threads) {
    for (int r = 0; r < rows; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int r = t; r < rows; r += threads) body(r);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace fatou::detail
