#pragma once

#include <cstddef>
#include <functional>

namespace gaudin {

/// Worker count: GAUDIN_THREADS when set and positive, otherwise the
/// hardware concurrency (0 means auto).
std::size_t thread_count();

/// Calls body(k) for k in [0, n) on up to thread_count() threads. Work is
/// split into contiguous blocks, so results written by index are
/// deterministic. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gaudin
