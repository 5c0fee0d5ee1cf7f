#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace stabkit {

// Worker count: STABKIT_THREADS if set to a positive integer, else hardware concurrency.
inline unsigned thread_count()
{
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("STABKIT_THREADS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return unsigned(v);
    } catch (...) {
    }
  }
  return hw;
}

// Calls f(i) for i in [0, n); each index is visited exactly once, order across workers unspecified.
template <class F>
void parallel_for(std::size_t n, F &&f, unsigned threads = thread_count())
{
  threads = unsigned(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  for (auto &th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

} // namespace stabkit
