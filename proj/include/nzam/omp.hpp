#pragma once

// #include this instead of <omp.h> so the library still builds without OpenMP.

#if defined(_OPENMP)
#include <omp.h>
namespace nzam {
constexpr bool use_omp = true;
} // namespace nzam
#else
namespace nzam {
constexpr bool use_omp = false;
} // namespace nzam
inline int omp_get_thread_num() { return 0; }
inline int omp_get_max_threads() { return 1; }
inline void omp_set_num_threads(int) {}
#endif
