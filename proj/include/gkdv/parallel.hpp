#pragma once

#include <cstddef>
#include <functional>

namespace gkdv {

/// Worker cap: GKDV_THREADS if set to a positive integer, else the hardware count.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads.
/// Each index is processed exactly once, so results written per index are
/// independent of the thread count. The first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace gkdv
