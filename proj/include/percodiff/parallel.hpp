#pragma once

#include <cstddef>
#include <functional>

namespace percodiff {

/// Number of workers to use for a request of `threads` (<= 0 means all cores).
int resolve_threads(int threads);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items are
/// independent and write to their own slots, so results never depend on the
/// worker count. The first exception thrown by any item is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace percodiff
