#pragma once

#include <cstddef>
#include <functional>

namespace aoilq {

/// Worker cap: AOI_LQ_THREADS when set and positive, otherwise the
/// hardware concurrency (at least 1).
std::size_t max_threads();

/// Runs fn(0) .. fn(count - 1) across up to max_threads() workers.
/// Exceptions propagate; job order of completion is unspecified, so
/// callers aggregate by index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace aoilq
