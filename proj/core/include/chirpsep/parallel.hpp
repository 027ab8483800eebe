#pragma once

#include <functional>

namespace chirpsep {

// Worker count: min(hardware_concurrency, CHIRPSEP_THREADS), at least 1.
int worker_threads();

// Runs fn(i) for i in [begin, end) on worker_threads() threads with static
// chunking. Output written into index-addressed slots is identical to a
// sequential loop regardless of thread count.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

}  // namespace chirpsep
