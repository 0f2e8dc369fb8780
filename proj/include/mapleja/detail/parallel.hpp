#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mapleja {

namespace detail {
inline std::atomic<unsigned>& thread_limit_storage() {
  static std::atomic<unsigned> limit{std::max(1u, std::thread::hardware_concurrency())};
  return limit;
}
}  // namespace detail

/// Caps the worker count used by the Monte Carlo estimators.
inline void set_thread_limit(unsigned n) { detail::thread_limit_storage() = std::max(1u, n); }
inline unsigned thread_limit() { return detail::thread_limit_storage(); }

namespace detail {

/// Runs fn(chunk) for chunk in [0, chunks) on up to thread_limit() workers.
/// Chunk boundaries never depend on the worker count, so reductions done per
/// chunk and combined in chunk order are reproducible.
template <class Fn>
void for_each_chunk(std::size_t chunks, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_limit(), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          fn(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = chunks;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline constexpr std::size_t kChunkSize = 4096;

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

}  // namespace detail
}  // namespace mapleja
