#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace gasket {

/// Caps worker threads used by parallel loops; 0 means hardware concurrency.
void set_max_threads(unsigned n);
[[nodiscard]] unsigned max_threads();

/// Calls body(i) for every i in [0, n), split into contiguous chunks across
/// at most max_threads() workers. Bodies must write only to slot i.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(max_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

}  // namespace gasket
