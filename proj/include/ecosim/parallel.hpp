#pragma once

#include <cstddef>
#include <functional>

namespace ecosim {

/// Calls fn(i) for every i in [0, n) on up to `workers` threads (0 picks the
/// hardware concurrency). fn must only write state owned by index i. The first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned workers = 0);

}  // namespace ecosim
