#pragma once

#include <cstddef>
#include <functional>

namespace bssdim {

// Number of workers actually used for a requested thread count
// (<= 0 means all available cores).
int resolve_threads(int threads);

// Runs fn(i) for every i in [0, count) on up to `threads` workers.
// fn must be safe to call concurrently for distinct i; the first exception
// thrown by any worker is rethrown on the calling thread after all workers
// finish.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace bssdim
