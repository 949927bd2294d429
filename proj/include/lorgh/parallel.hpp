#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace lorgh {

// Worker count: LORGH_THREADS if set and positive, else hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("LORGH_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

// Runs f(i) for i in [begin, end) with dynamic scheduling. f must only write
// to per-index state, so results do not depend on the schedule.
template <typename F>
void parallel_for(std::size_t begin, std::size_t end, F&& f) {
  if (end <= begin) return;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), end - begin));
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&] {
    try {
      for (std::size_t i = next++; i < end; i = next++) f(i);
    } catch (...) {
      std::lock_guard lock(err_mu);
      if (!err) err = std::current_exception();
      next = end;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace lorgh
