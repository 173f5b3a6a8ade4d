#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dispersmooth {

namespace detail {
inline std::atomic<unsigned>& worker_setting() {
  static std::atomic<unsigned> workers{0};
  return workers;
}
}  // namespace detail

/// Number of worker threads used by parallel loops. Zero means "decide":
/// DISPERSMOOTH_WORKERS if set, otherwise the hardware concurrency.
inline void set_workers(unsigned n) { detail::worker_setting().store(n); }

inline unsigned workers() {
  unsigned n = detail::worker_setting().load();
  if (n != 0) return n;
  if (const char* env = std::getenv("DISPERSMOOTH_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end) over [0, count) split into fixed chunks of `chunk`
/// items. Chunk boundaries never depend on the worker count, so any body that
/// only writes to its own index range produces identical output for every
/// thread count.
template <class Body>
void parallel_chunks(std::size_t count, std::size_t chunk, Body&& body) {
  if (count == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t nchunks = (count + chunk - 1) / chunk;
  const unsigned nthreads =
      static_cast<unsigned>(std::min<std::size_t>(workers(), nchunks));
  if (nthreads <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c)
      body(c * chunk, std::min(count, (c + 1) * chunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      try {
        body(c * chunk, std::min(count, (c + 1) * chunk));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(nchunks);
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  parallel_chunks(count, 1, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) body(i);
  });
}

}  // namespace dispersmooth
