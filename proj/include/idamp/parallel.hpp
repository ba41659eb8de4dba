#pragma once

#include <cstddef>
#include <functional>

namespace idamp {

// Worker count from ARTIFACT_THREADS (default: hardware concurrency).
int worker_count();

// Runs body(i) for i in [0, n) on a bounded pool. Results must be written to
// index-addressed storage by the caller, so the outcome does not depend on
// scheduling. The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace idamp
