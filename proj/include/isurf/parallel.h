#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace isurf {

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(chunk_index, begin, end) over [0, count) split into fixed-size
// chunks. Chunk boundaries depend only on (count, chunk_size), never on the
// thread count, so per-chunk outputs merged in chunk order are deterministic.
inline void parallel_chunks(std::int64_t count, std::int64_t chunk_size, int threads,
                            const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn) {
  if (count <= 0) return;
  const std::int64_t n_chunks = (count + chunk_size - 1) / chunk_size;
  threads = std::min<std::int64_t>(resolve_thread_count(threads), n_chunks);
  if (threads <= 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c)
      fn(c, c * chunk_size, std::min(count, (c + 1) * chunk_size));
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::int64_t c = next.fetch_add(1, std::memory_order_relaxed);
        if (c >= n_chunks) return;
        fn(c, c * chunk_size, std::min(count, (c + 1) * chunk_size));
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace isurf
