#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace anovacheb {

/// Resolves a requested thread count: 0 means "use the environment default"
/// (ANOVACHEB_THREADS, else the hardware concurrency), and the result is
/// clamped to [1, task_count].
int resolve_threads(int requested, std::size_t task_count);

/// Runs fn(i) for i in [0, n).  Tasks are distributed in fixed contiguous
/// blocks and every task writes only its own slot of whatever output the
/// caller owns, so the result never depends on the thread count.  The
/// first exception thrown by a task is rethrown on the calling thread.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace anovacheb
