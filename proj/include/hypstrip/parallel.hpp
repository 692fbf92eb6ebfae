#pragma once

#include <functional>

namespace hypstrip {

/// Caps the number of worker threads (0 = hardware concurrency).
void set_max_workers(int n);
int max_workers();

/// Runs body(i) for i in [begin, end) split into contiguous blocks, one per
/// worker. Every index writes its own output, so results do not depend on the
/// worker count. Each worker gets at least `grain` indices.
void parallel_for(int begin, int end, const std::function<void(int)>& body, int grain = 1);

}  // namespace hypstrip
