#pragma once

namespace a2dr {

// Thread-count control for the OpenMP kernels. No-ops when built without
// OpenMP. Results are bitwise independent of the thread count by design;
// see sparse.cpp for the partitioning argument.
void set_threads(int k);
int max_threads();

}  // namespace a2dr
