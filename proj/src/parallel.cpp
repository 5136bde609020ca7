#include "a2dr/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace a2dr {

void set_threads(int k) {
#ifdef _OPENMP
    if (k > 0) omp_set_num_threads(k);
#else
    (void)k;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace a2dr
