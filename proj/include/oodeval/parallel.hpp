// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace oodeval {

/// Thread cap: OODEVAL_THREADS if set (>=1), else hardware concurrency.
int max_threads();

/// Runs fn(i) for i in [0, n) with static contiguous chunking over at most
/// max_threads() workers. Each index must write only its own output slot;
/// results are then identical for any thread count. The first exception
/// thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace oodeval
