#pragma once

#include <cstdint>
#include <functional>

namespace defaultgap {

// Runs fn(i) for i in [0, n) over `threads` workers with static contiguous
// chunks. Callers write to pre-sized slot i only, so results are identical
// for any thread count; reductions happen sequentially afterwards.
void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t)>& fn);

} // namespace defaultgap
