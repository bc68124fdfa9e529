#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace lacldp {

// Worker count: LACLDP_THREADS if set and positive, otherwise the hardware
// concurrency (at least 1).
unsigned worker_count();

// Runs body(i) for i in [0, count). Work is split into contiguous chunks, so
// callers that write results by index get output independent of the
// scheduling order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Pairwise (cascade) summation with a fixed reduction tree.
double pairwise_sum(std::span<const double> values);

}  // namespace lacldp
