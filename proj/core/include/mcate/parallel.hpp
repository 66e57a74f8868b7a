#pragma once

#include <functional>

namespace mcate {

// Number of worker threads: MCATE_WORKERS when set (minimum 1), otherwise
// the hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, count) across up to `workers` threads (0 picks
// worker_count()). Work items must be independent; exceptions from any item
// are rethrown on the calling thread after all threads join. Results written
// by index stay deterministic regardless of scheduling.
void parallel_for(int count, const std::function<void(int)>& fn, int workers = 0);

}  // namespace mcate
