#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace survmed {

/// Runs fn(begin, end) over contiguous chunks of [0, n) on up to `workers`
/// threads. Chunk boundaries depend only on n and workers; callers that need
/// worker-independent output must make fn's result independent of the
/// partition (per-index RNG streams, ordered merge).
template <class Fn>
void parallel_for_ranges(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(workers, n);
  std::vector<std::exception_ptr> errors(chunks);
  {
    std::vector<std::jthread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t begin = n * c / chunks;
      const std::size_t end = n * (c + 1) / chunks;
      pool.emplace_back([&, c, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline unsigned default_workers() noexcept {
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace survmed
