#pragma once

#include <cstddef>
#include <functional>

namespace qdyn {

// Thread cap resolution order: explicit argument > QDYN_THREADS env > hardware.
int default_thread_count();

// Static partition of [0, n) over at most `threads` workers.  `body(i)` must
// only write state owned by index i; results are then independent of the
// schedule.  threads <= 1 runs inline.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace qdyn
