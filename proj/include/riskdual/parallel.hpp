#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Index-parallel map used by the hot loops (scenario sweeps, audit samples).
// Each iteration writes only its own slot, so the result is identical to the
// serial reference path item for item; reductions happen afterwards in index
// order. parallel_map(..., false) IS the serial reference implementation —
// tests and the benchmark tool compare the two directly.

namespace riskdual {

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn, bool parallel = true) {
    std::vector<T> out(n);
#ifdef _OPENMP
    if (parallel && n > 1) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        return out;
    }
#else
    (void)parallel;
#endif
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
}

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace riskdual
