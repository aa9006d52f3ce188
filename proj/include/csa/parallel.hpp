#pragma once

#include <functional>

namespace csa {

/// Effective worker count: requested, or hardware concurrency when
/// requested <= 0 (at least 1).
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n) across `threads` workers. Callers must
/// write results into disjoint per-index slots; aggregation stays
/// deterministic because slot order is fixed.
void parallel_for(long n, int threads, const std::function<void(long)>& body);

}  // namespace csa
