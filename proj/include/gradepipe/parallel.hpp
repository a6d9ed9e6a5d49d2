#pragma once

#include <cstddef>
#include <functional>

namespace gradepipe {

/// Worker count from GRADEPIPE_THREADS (0 or unset = hardware concurrency).
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Callers
/// write results into per-index slots, so output order never depends on
/// scheduling. If any call throws, the exception from the lowest index is
/// rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gradepipe
