#pragma once

#include <cstddef>
#include <functional>

namespace raftcensus {

/// Worker cap: RAFT_CENSUS_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int worker_count();

/// Runs task(i) for i in [0, n). Tasks are handed out in contiguous blocks;
/// callers write results by index, so output never depends on thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace raftcensus
