#pragma once

#include <cstddef>
#include <functional>

namespace bdd {

/// Worker count: hardware concurrency, capped by the BDD_THREADS environment variable.
std::size_t worker_count();

/// Splits [0, n) into contiguous chunks and runs `body(begin, end)` on each,
/// one chunk per worker. The first exception thrown by any chunk is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace bdd
