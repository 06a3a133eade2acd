#pragma once

#include <functional>

namespace cbf {

// Runs fn(0..count-1) on up to `threads` workers.  Work item i must only
// write to its own slot so results do not depend on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace cbf
