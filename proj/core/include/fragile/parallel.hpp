#pragma once

#include <cstddef>
#include <functional>

namespace fragile {

// Worker count used by parallel_for; 0 selects hardware concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

// Runs body(i) for i in [0, n) across worker threads.
// Results must be written to per-index slots so output is independent of the
// thread count. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fragile
