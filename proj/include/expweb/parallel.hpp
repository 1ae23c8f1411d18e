#pragma once

#include <cstddef>
#include <functional>

namespace expweb {

// Runs body(begin, end) over [0, count) split into fixed-size chunks.  Chunk
// boundaries depend only on count and chunk_size, never on the worker
// count, so per-chunk results merged in chunk order are reproducible.
void parallel_chunks(std::size_t count, std::size_t chunk_size, unsigned workers,
                     const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& body);

inline std::size_t chunk_count(std::size_t count, std::size_t chunk_size) {
  return (count + chunk_size - 1) / chunk_size;
}

unsigned default_workers();

}  // namespace expweb
