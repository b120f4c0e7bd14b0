#pragma once

#include <cstddef>
#include <functional>

namespace mvgof {

/// Worker count: MVGOF_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Splits [0, count) into contiguous chunks, one per worker, and calls
/// body(begin, end) for each. Chunk boundaries never influence results as
/// long as body writes only to indices it owns.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace mvgof
