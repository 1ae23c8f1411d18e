#include "expweb/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace expweb {

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void parallel_chunks(std::size_t count, std::size_t chunk_size, unsigned workers,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  chunk_size = std::max<std::size_t>(1, chunk_size);
  const std::size_t chunks = chunk_count(count, chunk_size);
  const auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    body(c, begin, std::min(count, begin + chunk_size));
  };
  workers = std::max(1u, workers);
  if (workers == 1 || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          run_chunk(c);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace expweb
