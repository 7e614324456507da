#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace planecell {

/// Worker-pool cap: PLANECELL_THREADS when set, hardware concurrency
/// otherwise, never below 1.
inline int thread_cap() {
  if (const char* env = std::getenv("PLANECELL_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

/// Runs fn(0..n_jobs-1) on up to max_threads workers (0 = thread_cap()).
/// Exceptions from jobs are rethrown on the calling thread.
inline void run_parallel(std::size_t n_jobs, int max_threads,
                         const std::function<void(std::size_t)>& fn) {
  if (max_threads <= 0) max_threads = thread_cap();
  const std::size_t workers =
      std::min<std::size_t>(std::size_t(max_threads), n_jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_jobs; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n_jobs; i = next.fetch_add(1))
          fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace planecell
