#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tunnelsplit {

// Worker count for data-parallel loops. Defaults to TUNNELSPLIT_THREADS,
// else the hardware concurrency.
unsigned thread_count();
void set_thread_count(unsigned n);

// Calls f(begin, end) on contiguous chunks of [0, n).
template <class F>
void parallel_for(std::size_t n, F&& f, std::size_t min_chunk = 64) {
  unsigned workers = thread_count();
  std::size_t chunks = std::min<std::size_t>(workers, (n + min_chunk - 1) / min_chunk);
  if (chunks <= 1) {
    if (n > 0) f(std::size_t{0}, n);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(chunks);
  std::size_t step = (n + chunks - 1) / chunks;
  for (std::size_t c = 0; c < chunks; ++c) {
    std::size_t begin = c * step;
    std::size_t end = std::min(n, begin + step);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        f(begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace tunnelsplit
