#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace collatz {

// Deterministic parallel map over [begin, end): the range is cut into
// fixed-size chunks (layout depends only on the range and chunk_size, never
// on the thread count), workers grab chunks through an atomic cursor, and
// results land in chunk order. Merging results[0..n) sequentially therefore
// yields the same answer for any thread count or scheduling.
template <typename Result, typename Fn>
std::vector<Result> chunked_map(std::uint64_t begin, std::uint64_t end,
                                std::uint64_t chunk_size, unsigned threads,
                                Fn&& fn) {
  if (end < begin) end = begin;
  if (chunk_size == 0) chunk_size = 1;
  const std::uint64_t total = end - begin;
  const std::uint64_t chunks = total == 0 ? 0 : (total + chunk_size - 1) / chunk_size;

  std::vector<Result> results(static_cast<std::size_t>(chunks));
  if (chunks == 0) return results;

  auto run_chunk = [&](std::uint64_t index) {
    const std::uint64_t lo = begin + index * chunk_size;
    const std::uint64_t hi = std::min<std::uint64_t>(lo + chunk_size, end);
    results[static_cast<std::size_t>(index)] = fn(lo, hi);
  };

  if (threads <= 1 || chunks == 1) {
    for (std::uint64_t i = 0; i < chunks; ++i) run_chunk(i);
    return results;
  }

  std::atomic<std::uint64_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = cursor.fetch_add(1, std::memory_order_relaxed);
      if (i >= chunks) return;
      run_chunk(i);
    }
  };

  const unsigned n = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, chunks));
  std::vector<std::thread> pool;
  pool.reserve(n - 1);
  for (unsigned t = 0; t + 1 < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace collatz
