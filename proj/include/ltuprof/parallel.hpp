#pragma once

#include <cstddef>
#include <functional>

namespace ltuprof {

// Process-wide worker cap; 0 = hardware concurrency. Set once from the CLI
// --threads flag.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs fn(i) for i in [0, n). Work is split into fixed contiguous chunks, so
// results written to per-index slots are identical for every worker count.
// Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ltuprof
