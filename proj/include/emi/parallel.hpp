#pragma once

#include <cstddef>
#include <functional>

namespace emi {

/// Resolves a thread-count request: n > 0 is taken as-is, n == 0 consults
/// the EMI_THREADS environment variable and falls back to the hardware
/// concurrency.
unsigned resolve_threads(int requested);

/// Runs fn(i) for i in [0, n), partitioned across `threads` workers.
/// Exceptions thrown by fn are captured and the first one rethrown after
/// all workers join.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace emi
