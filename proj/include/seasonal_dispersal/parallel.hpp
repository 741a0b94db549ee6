#pragma once

#include <cstddef>
#include <functional>

namespace sdisp {

/// Worker cap from SEASONAL_DISPERSAL_THREADS (0 or unset = hardware
/// concurrency).
unsigned worker_count();

/// Runs task(i) for i in [0, count) on up to worker_count() threads. Each
/// index runs exactly once; results must be written to disjoint slots.
/// The first exception thrown by a task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace sdisp
