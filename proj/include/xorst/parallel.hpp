#pragma once

#include <cstddef>
#include <functional>

namespace xorst {

/// Worker count: SELFTEST_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n). Each index is processed exactly once; the
/// caller must write results into per-index slots so output order does not
/// depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace xorst
