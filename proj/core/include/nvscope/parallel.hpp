#pragma once

#include <cstddef>
#include <functional>

namespace nvscope {

/// Number of workers to use: `requested` if non-zero, else NVSCOPE_THREADS, else the hardware
/// concurrency.
unsigned resolve_threads(unsigned requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Work is split into contiguous
/// chunks; the first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &body);

} // namespace nvscope
