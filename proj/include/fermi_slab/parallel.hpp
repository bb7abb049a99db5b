#pragma once

#include <functional>

namespace fslab {

/// Worker count: FERMI_SLAB_THREADS if set (>= 1), else hardware concurrency.
int max_threads();

/// Runs body(begin, end) over contiguous chunks of [0, count). Chunking
/// depends only on count and the worker count, never on timing.
void parallel_for(int count, const std::function<void(int, int)>& body);

}  // namespace fslab
