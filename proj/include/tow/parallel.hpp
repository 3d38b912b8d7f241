#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tow {

/// Static contiguous chunks, one per thread; chunk c always covers the same
/// index range so per-chunk partial results can be combined in chunk order.
template <class Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn) {
  const std::size_t t = static_cast<std::size_t>(std::max(1, threads));
  if (t == 1 || n < 2 * t) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  for (std::size_t c = 0; c < t; ++c) {
    const std::size_t lo = n * c / t, hi = n * (c + 1) / t;
    pool.emplace_back([&, c, lo, hi] {
      try {
        fn(c, lo, hi);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::size_t chunk_count(std::size_t n, int threads) {
  const std::size_t t = static_cast<std::size_t>(std::max(1, threads));
  return (t == 1 || n < 2 * t) ? 1 : t;
}

}  // namespace tow
