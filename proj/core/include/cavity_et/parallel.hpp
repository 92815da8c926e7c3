#pragma once

#include <cstddef>
#include <functional>

namespace cavity_et {

/// Number of hardware threads (at least 1).
std::size_t hardware_threads();

/// Runs `body(i)` for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; callers write results into index-addressed slots, so
/// the output is independent of scheduling. The first exception thrown by any
/// body is rethrown after all workers have stopped.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace cavity_et
