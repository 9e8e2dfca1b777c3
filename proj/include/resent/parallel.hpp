#pragma once

#include <cstddef>
#include <functional>

namespace resent {

/// Worker count: RESENT_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_count();

/// Calls fn(i) for every i in [0, count), spread over thread_count() workers.
/// Each index is visited exactly once; callers write results into
/// preallocated slots so the output order never depends on scheduling. The
/// first exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace resent
