#pragma once

// Minimal fork-join helper. Work items write to disjoint output slots, so
// results are identical for any worker count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace gnp {

// Number of workers to use: explicit request, else GNPERC_THREADS, else
// hardware concurrency.
std::size_t effective_threads(std::size_t requested = 0);

// Runs fn(i) for i in [0, n). fn must only touch state owned by item i.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::min(effective_threads(threads), std::max<std::size_t>(n, 1));
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    // Chunked self-scheduling; chunk size keeps contention low.
    const std::size_t chunk = std::max<std::size_t>(1, n / (threads * 8));
    for (;;) {
      std::size_t begin = next.fetch_add(chunk);
      if (begin >= n) return;
      std::size_t end = std::min(n, begin + chunk);
      for (std::size_t i = begin; i < end; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace gnp
