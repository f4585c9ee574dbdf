#pragma once

#include <cstdint>
#include <functional>

namespace tvor {

// 0 -> hardware concurrency, otherwise the request itself (min 1).
int resolve_threads(int requested);

// Runs fn(0..count-1) across `threads` workers. Callers keep determinism by
// writing results into preallocated slots and reducing in index order.
void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& fn);

} // namespace tvor
