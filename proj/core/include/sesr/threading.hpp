#pragma once

#include <functional>

namespace sesr {

/// Caps BLAS and harness worker threads. 0 restores the hardware default.
void set_compute_threads(int n);
int compute_threads();

/// Index-chunked parallel loop; results must be written to disjoint slots so
/// the outcome is independent of scheduling.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace sesr
