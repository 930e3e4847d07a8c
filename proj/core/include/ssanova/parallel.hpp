#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ssanova {

/// Resolve a requested thread count: values < 1 mean "use all hardware
/// threads"; the result is always >= 1.
inline int resolve_threads(int requested) {
  if (requested >= 1) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run body(i) for i in [0, count) on up to `threads` worker threads.
/// Work is handed out through a shared atomic counter, so the mapping of
/// iterations to threads is dynamic but each iteration runs exactly once.
/// The first exception thrown by any iteration is rethrown on the caller.
inline void parallel_for(std::int64_t count, int threads,
                         const std::function<void(std::int64_t)>& body) {
  if (count <= 0) return;
  const int workers = std::min<std::int64_t>(resolve_threads(threads), count);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::int64_t> next(0);
  std::atomic<bool> stop(false);
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto run = [&]() {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        stop.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(run);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ssanova
