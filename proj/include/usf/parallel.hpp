#pragma once

#include <cstddef>
#include <functional>

namespace usf {

/// Worker count: USF_THREADS if set and positive, else the hardware
/// concurrency, never less than 1.
std::size_t worker_count();

/// Runs body(i) for i in [0, count), splitting the range into contiguous
/// chunks over worker_count() threads. Results must be written to per-index
/// slots by the caller; reduction order is then independent of scheduling.
/// The first exception thrown by any chunk is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace usf
