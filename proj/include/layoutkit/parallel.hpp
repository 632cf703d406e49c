#pragma once
#include <cstddef>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace layoutkit {

// Every parallel kernel in this project is a map into index-addressed slots
// followed by an ordered serial reduction. The map is safe under any OpenMP
// schedule because each slot is written exactly once, and the ordered
// reduction makes results bit-identical to the serial reference regardless
// of thread count.
enum class ExecMode { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

template <typename F>
void indexed_for(ExecMode mode, std::int64_t n, F&& body) {
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::int64_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  }
}

}  // namespace layoutkit
