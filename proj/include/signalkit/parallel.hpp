#pragma once

#include <cstddef>
#include <functional>

namespace signalkit {

// Worker count: SIGNALKIT_THREADS if set (>= 1), else the hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n). Iterations must be independent. The first exception
// thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace signalkit
