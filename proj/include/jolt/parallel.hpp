#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace jolt {

/// Work is always split into kParallelChunks contiguous chunks, independent of
/// the worker count. Chunk-indexed partial results can therefore be combined
/// in chunk order, making floating-point output identical for any thread count.
inline constexpr int kParallelChunks = 64;

/// Runs f(chunk, begin, end) for every chunk of [0, n). `workers` <= 1 runs
/// inline. Chunks are assigned to workers round-robin by chunk index.
template <typename F>
void parallel_chunks(std::size_t n, int workers, F&& f) {
  if (n == 0) return;
  const std::size_t per = (n + kParallelChunks - 1) / kParallelChunks;
  const int used_chunks = static_cast<int>((n + per - 1) / per);
  if (workers <= 1 || used_chunks == 1) {
    for (int c = 0; c < used_chunks; ++c) {
      const std::size_t b = static_cast<std::size_t>(c) * per;
      f(c, b, std::min(n, b + per));
    }
    return;
  }
  const int nw = std::min(workers, used_chunks);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&, w]() {
      for (int c = w; c < used_chunks; c += nw) {
        const std::size_t b = static_cast<std::size_t>(c) * per;
        f(c, b, std::min(n, b + per));
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace jolt
