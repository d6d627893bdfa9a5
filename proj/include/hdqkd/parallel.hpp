#pragma once

#include <cstddef>
#include <functional>

namespace hdqkd {

/// Worker cap: HDQKD_THREADS when set (>= 1), else hardware concurrency.
int max_threads();

/// Runs body(0) ... body(count-1) across up to max_threads() workers.
/// Each index is visited exactly once; callers write results by index, so
/// output is independent of the thread count. The first exception thrown
/// by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hdqkd
