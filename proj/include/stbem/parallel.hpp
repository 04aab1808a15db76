#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stbem {

/// Worker count used when callers pass 0.
inline int default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

/// Runs f(k) for k in [0, n) on a pool of threads. Work items are handed out
/// dynamically; f must write disjoint outputs, so results do not depend on
/// the worker count. The first exception thrown by any item is rethrown.
template <class F>
void parallel_for(long n, F&& f, int workers = 0) {
  if (workers <= 0) workers = default_workers();
  workers = static_cast<int>(std::min<long>(workers, n));
  if (workers <= 1) {
    for (long k = 0; k < n; ++k) f(k);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const long k = next.fetch_add(1);
      if (k >= n) return;
      try {
        f(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace stbem
