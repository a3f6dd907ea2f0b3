#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cfbell::detail {

/// Calls task(i) for every i in [0, count) on up to `threads` workers.
/// Tasks claim indices from a shared counter; callers store results by index
/// so the outcome never depends on scheduling. The first exception is rethrown.
template <typename Task>
void for_each_index(std::size_t count, unsigned threads, Task&& task) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1U, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace cfbell::detail
