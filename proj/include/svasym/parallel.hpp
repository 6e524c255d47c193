#pragma once

#include <cstddef>
#include <functional>

namespace svasym {

/// Worker count: explicit request if nonzero, else SVASYM_THREADS if set and nonzero,
/// else the hardware concurrency.
unsigned worker_count(unsigned requested = 0);

/// Runs body(chunk_index, begin, end) over [0, items) split into fixed-size chunks.
/// Chunk boundaries depend only on items and chunk_size, never on the worker count.
/// The first exception thrown by any chunk is rethrown after all workers stop.
void parallel_chunks(std::size_t items, std::size_t chunk_size, unsigned workers,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

inline std::size_t chunk_count(std::size_t items, std::size_t chunk_size) {
  return (items + chunk_size - 1) / chunk_size;
}

}  // namespace svasym
