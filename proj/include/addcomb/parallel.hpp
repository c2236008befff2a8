#pragma once

// Minimal data-parallel helper. Work is split into contiguous chunks and every
// chunk writes its own partial result; callers reduce partials in chunk order,
// so results never depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace addcomb {

namespace detail {
inline std::atomic<unsigned>& thread_cap() {
  static std::atomic<unsigned> cap{1};
  return cap;
}
}  // namespace detail

/// Caps the number of worker threads used by library kernels (0 selects hardware concurrency).
inline void set_max_threads(unsigned n) {
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  detail::thread_cap().store(n);
}
inline unsigned max_threads() { return detail::thread_cap().load(); }

/// Runs body(chunk, begin, end) over [0, n) split into at most max_threads() chunks.
/// Returns the number of chunks used.
template <class Body>
std::size_t parallel_chunks(std::size_t n, Body&& body, std::size_t min_chunk = 1) {
  std::size_t workers = std::min<std::size_t>(max_threads(), std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_chunk)));
  workers = std::max<std::size_t>(1, workers);
  if (workers == 1) {
    body(std::size_t{0}, std::size_t{0}, n);
    return 1;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t step = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = std::min(n, w * step);
    const std::size_t hi = std::min(n, lo + step);
    pool.emplace_back([&, w, lo, hi] {
      try {
        body(w, lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return workers;
}

/// Maximum number of chunks parallel_chunks may use; size per-chunk partial buffers with this.
inline std::size_t chunk_slots() { return std::max<std::size_t>(1, max_threads()); }

}  // namespace addcomb
