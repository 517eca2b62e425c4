#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace nearflow {

/// Splits [0, n) into `workers` contiguous chunks and runs `body(chunk_index,
/// begin, end)` on each. Chunk boundaries depend only on (n, workers), so any
/// per-chunk results can be merged in chunk order for scheduling-independent
/// output.
inline void parallel_chunks(std::size_t n, unsigned workers,
                            const std::function<void(unsigned, std::size_t, std::size_t)>& body) {
  if (workers <= 1 || n < 2) {
    body(0, 0, n);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t base = n / workers, rem = n % workers;
  std::size_t begin = 0;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t len = base + (w < rem ? 1 : 0);
    threads.emplace_back(body, w, begin, begin + len);
    begin += len;
  }
  for (auto& t : threads) t.join();
}

/// 64-bit mix used to derive independent RNG streams from (seed, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace nearflow
