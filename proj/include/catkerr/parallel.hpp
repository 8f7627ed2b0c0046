#pragma once

#include <cstddef>
#include <functional>

namespace catkerr {

/// Worker count: hardware concurrency, capped by CATKERR_THREADS when set.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads. Each index is
/// handled by exactly one worker; the first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace catkerr
