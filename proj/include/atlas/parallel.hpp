#pragma once

#include <cstddef>
#include <functional>

namespace atlas {

// Process-wide worker count used by every parallel loop in the library.
// Defaults to std::thread::hardware_concurrency(); 1 runs inline.
std::size_t worker_count();
void set_worker_count(std::size_t n);

// Splits [0, n) into contiguous chunks, one per worker, and calls
// body(begin, end) for each. Chunk boundaries depend only on n and the
// worker count, so callers that write into per-index slots and reduce
// afterwards in index order get thread-count-independent results.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace atlas
