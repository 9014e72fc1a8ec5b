#pragma once

#include <cstddef>
#include <functional>

namespace plslab {

/// Worker count used by parallel_for. Defaults to the PLSLAB_THREADS
/// environment variable when set, otherwise 1.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n). Iterations are distributed in contiguous
/// chunks; callers write results by index so reductions stay deterministic
/// for any worker count. The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace plslab
