#pragma once

#include <cstddef>
#include <functional>

namespace eval3d {

// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
// Iterations must be independent. The first exception thrown by any
// iteration is rethrown on the calling thread after all workers join.
void ParallelFor(size_t count, const std::function<void(size_t)>& body);

// Number of worker threads ParallelFor will use; EVAL3D_THREADS overrides.
size_t WorkerCount();

}  // namespace eval3d
