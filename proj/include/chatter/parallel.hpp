#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace chatter {

inline unsigned effective_jobs(int requested) {
  if (requested > 0) return unsigned(requested);
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

// Runs fn(i) for every i in [0, n) on up to `jobs` threads. Each index must
// write only its own output slot; under that contract the result does not
// depend on the schedule. The first exception thrown by any worker is
// rethrown on the caller's thread.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const unsigned nt = unsigned(std::min<std::size_t>(effective_jobs(jobs), n));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(nt);
  for (unsigned t = 0; t < nt; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace chatter
