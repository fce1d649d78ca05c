#pragma once

#include <cstddef>
#include <functional>

namespace qpart {

/// Caps the number of worker threads used by parallel_for.  0 means "use
/// hardware concurrency".  Results never depend on this value: workers only
/// fill independent slots and all reductions are sequential.
void set_worker_threads(std::size_t n);
std::size_t worker_threads();

/// Runs fn(i) for i in [begin, end), possibly on multiple threads.  fn must
/// only write to state owned by index i.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace qpart
