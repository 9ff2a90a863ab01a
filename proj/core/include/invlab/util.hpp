#pragma once

#include <cstdint>
#include <functional>

namespace invlab {

// Worker count for embarrassingly parallel loops: INVLAB_WORKERS when set,
// otherwise the hardware concurrency. Always at least 1.
int worker_count();

// Runs fn(i) for i in [0, n) on worker_count() threads. fn must only write
// to per-index slots; results are then independent of scheduling.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

} // namespace invlab
