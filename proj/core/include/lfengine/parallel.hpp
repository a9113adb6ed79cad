#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lfengine {

inline unsigned effective_threads(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items are
/// handed out dynamically; the first exception thrown by any worker is
/// rethrown on the calling thread after all workers exit.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  unsigned n_workers = effective_threads(threads);
  if (count == 0) return;
  if (n_workers <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  if (n_workers > count) n_workers = static_cast<unsigned>(count);

  std::mutex mutex;
  std::size_t next = 0;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mutex);
        if (first_error || next >= count) return;
        i = next++;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lfengine
