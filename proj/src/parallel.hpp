#pragma once

#include <cstddef>
#include <functional>

namespace silhuetta {

// Worker count: hardware concurrency, capped by SILHUETTA_THREADS when set.
unsigned worker_count();

// Runs body(lo, hi) over [begin, end) split into contiguous blocks of at most
// `grain` items. Block boundaries depend only on `grain`, never on the worker
// count, so per-block results can be merged deterministically by callers.
void parallel_for(std::size_t begin, std::size_t end, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace silhuetta
