#pragma once

#include <cstddef>
#include <functional>

namespace qnn_forge {

/// Worker cap: QNN_FORGE_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Calls body(k) for k in [0, count) on up to worker_count() threads. Each
/// index runs exactly once; callers write results into per-index slots and
/// reduce afterwards, so the outcome does not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qnn_forge
