#pragma once

#include <cstddef>
#include <functional>

namespace fpu {

// Worker count: hardware concurrency, capped by the FPU_THREADS
// environment variable when it holds a positive integer.
unsigned worker_count();

// Runs body(i) for i in [0, n) on worker_count() threads. Indices are
// handed out dynamically; body must only write state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fpu
