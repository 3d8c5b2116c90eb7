#pragma once

#include <cstddef>
#include <functional>

namespace termstruct {

// Runs fn(0..n-1) on up to `jobs` threads. Callers must write results into
// per-index slots; the first exception is rethrown after all workers join, so
// output never depends on scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace termstruct
