#pragma once

#include <cstddef>
#include <functional>

namespace fvt {

/// Runs fn(0..n-1) on up to `threads` std::threads with static contiguous
/// chunks. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace fvt
