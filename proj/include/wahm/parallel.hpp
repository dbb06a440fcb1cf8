#pragma once

#include <cstddef>
#include <functional>

namespace wahm {

/// Worker count: WAHM_THREADS if set and positive, else the hardware concurrency.
int thread_count();

/// Runs fn(i) for i in [0, n) on thread_count() threads. Each index must write only its own
/// output slot; results are therefore independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace wahm
