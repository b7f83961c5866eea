#pragma once

#include <omp.h>

namespace lynx {

/// Resolve a requested worker count: 0 means "all hardware threads",
/// 1 selects the serial reference path, N caps the OpenMP team size.
inline int effective_threads(int requested) {
    if (requested <= 0) return omp_get_max_threads();
    return requested;
}

}  // namespace lynx
