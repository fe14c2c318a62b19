#pragma once

#include <cstddef>
#include <functional>

namespace ousg {

/// Worker count used by parallel_for: the programmatic override if set,
/// else the OUSG_THREADS environment variable, else hardware concurrency.
int thread_count();

/// Caps the worker count; n <= 0 restores the default resolution order.
void set_thread_override(int n);

/// Runs fn(i) for every i in [0, n). Indices are dealt out in fixed blocks
/// whose layout does not depend on the worker count, so a caller that has
/// fn(i) write only to slot i of a preallocated buffer gets bitwise
/// identical results for any thread count. The first exception thrown by
/// fn, if any, is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ousg
