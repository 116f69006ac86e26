#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace jointpred {

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Deterministic chunked map: splits [0, n) into fixed-size chunks, runs
// `fn(chunk_index, begin, end)` across threads, and returns the per-chunk
// results in chunk order. Chunk boundaries depend only on (n, chunk_size),
// so reducing the returned vector sequentially yields results that are
// independent of the thread schedule and of the thread count.
template <class ChunkResult, class Fn>
std::vector<ChunkResult> run_chunked(long n, long chunk_size, int threads, Fn&& fn) {
  if (n <= 0) return {};
  const long n_chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<ChunkResult> results(static_cast<std::size_t>(n_chunks));
  const int n_threads = std::min<long>(resolve_thread_count(threads), n_chunks);

  if (n_threads <= 1) {
    for (long c = 0; c < n_chunks; ++c) {
      const long begin = c * chunk_size;
      const long end = std::min(n, begin + chunk_size);
      results[static_cast<std::size_t>(c)] = fn(c, begin, end);
    }
    return results;
  }

  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const long c = next.fetch_add(1);
      if (c >= n_chunks) return;
      const long begin = c * chunk_size;
      const long end = std::min(n, begin + chunk_size);
      try {
        results[static_cast<std::size_t>(c)] = fn(c, begin, end);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace jointpred
