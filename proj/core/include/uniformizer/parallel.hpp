#pragma once

#include <cstddef>
#include <functional>

namespace uniformizer {

/// Worker count: hardware concurrency, capped by UNIFORMIZER_THREADS when set.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Each index is
/// visited exactly once; callers write results into per-index slots so that
/// reductions stay independent of the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace uniformizer
