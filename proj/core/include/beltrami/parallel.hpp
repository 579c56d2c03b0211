#pragma once

#include <cstddef>
#include <functional>

namespace beltrami {

/// Worker cap: BELTRAMI_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads using a
/// fixed contiguous partition. Callers write results into per-index slots, so
/// output does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace beltrami
