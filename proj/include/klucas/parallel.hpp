#pragma once

// Minimal work sharing: run task(i) for i in [0, count) on a fixed number of
// threads. Tasks must not share mutable state; results are gathered by index.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace klucas {

inline constexpr const char* kWorkersEnv = "KLUCAS_WORKERS";

/// Worker count from KLUCAS_WORKERS, else the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for every i; rethrows the exception of the lowest failing index.
template <class Task>
void parallel_for(std::size_t count, Task&& task, unsigned workers = worker_count()) {
  if (count == 0) return;
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex guard;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace klucas
