#pragma once

#include <functional>

namespace pslab {

// Runs fn(i) for every i in [0, count) across up to `threads` workers.
// threads <= 1 runs inline. Work items are claimed atomically, so results
// must be written to per-index storage to stay deterministic. The first
// exception thrown by any worker is rethrown after all workers join.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace pslab
