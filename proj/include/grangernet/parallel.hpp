#pragma once

#include <cstddef>
#include <functional>

namespace grangernet {

/// Splits [0, n) into at most `workers` contiguous chunks and runs
/// `body(begin, end)` on each, one thread per chunk. The first exception
/// thrown by any chunk is rethrown after all threads join.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace grangernet
