#pragma once

#include <cstddef>
#include <functional>

namespace riskbound {

/// Worker count from RISKBOUND_WORKERS, else the hardware concurrency (at least 1).
int default_workers();

/**
 * Runs fn(i) for i in [0, n) on up to `workers` threads. Tasks must write only
 * to their own slot so results do not depend on scheduling. The exception of
 * the lowest failing index is rethrown.
 */
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

} // namespace riskbound
