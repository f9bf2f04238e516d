#pragma once

#include <functional>

namespace skewspec {

// Worker count resolution: explicit request > SKEWSPEC_THREADS > hardware.
// requested <= 0 means "not specified".
int resolve_thread_count(int requested);

// Runs fn(i) for i in [0, n). Each index must be independent; callers store
// per-index results and reduce in index order afterwards, so the outcome is
// identical for every worker count.
void parallel_for(long n, int threads, const std::function<void(long)>& fn);

}  // namespace skewspec
