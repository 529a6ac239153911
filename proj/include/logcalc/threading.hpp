#pragma once

#include <cstddef>
#include <functional>

namespace logcalc {

/// Worker cap: LOGCALC_THREADS when set (>= 1), else hardware size capped at 8.
int max_threads();

/// Runs body(i) for i in [0, n). Bodies must write only to their own slots;
/// reductions stay deterministic because callers combine slots in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace logcalc
