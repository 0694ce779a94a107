#pragma once

#include <cstddef>
#include <functional>

namespace trapwave {

/// Worker count: TRAPPED_WAVE_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
/// write results into per-index slots so the outcome does not depend on
/// scheduling. Exceptions are rethrown on the calling thread (the one from the
/// lowest index wins). A parallel_for inside a body runs serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace trapwave
