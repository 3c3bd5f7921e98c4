#pragma once

#include <cstddef>
#include <functional>

namespace aninorm {

/// Worker count: ANINORM_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 selects
/// worker_count()). Work items must write only to their own output slots;
/// the first exception thrown by any item is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t workers = 0);

}  // namespace aninorm
