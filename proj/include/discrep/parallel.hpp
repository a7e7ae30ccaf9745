#pragma once

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace discrep {

// Runs body(i) for every i in [0, count). threads == 0 takes the serial
// reference loop; otherwise OpenMP (when compiled in) runs the iterations
// dynamically over that many workers. Callers must write results into
// caller-owned slots indexed by i, so output never depends on scheduling;
// the serial path is the semantic reference the parallel one is tested
// against.
template <class Body>
void parallel_for_partitions(int count, int threads, Body&& body) {
    if (threads == 0) {
        for (int i = 0; i < count; i++) body(i);
        return;
    }
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int i = 0; i < count; i++) body(i);
#else
    for (int i = 0; i < count; i++) body(i);
#endif
}

// Like parallel_for_partitions, but each body(i) is followed by sink(i)
// fired strictly in ascending i order, so a streaming consumer observes the
// serial sequence while at most `threads` bodies run ahead. sink must not
// throw when threads > 0 (it runs inside the OpenMP ordered region).
template <class Body, class Sink>
void parallel_ordered_partitions(int count, int threads, Body&& body, Sink&& sink) {
    if (threads == 0) {
        for (int i = 0; i < count; i++) {
            body(i);
            sink(i);
        }
        return;
    }
#if defined(_OPENMP)
#pragma omp parallel for ordered schedule(dynamic, 1) num_threads(threads)
    for (int i = 0; i < count; i++) {
        body(i);
#pragma omp ordered
        sink(i);
    }
#else
    for (int i = 0; i < count; i++) {
        body(i);
        sink(i);
    }
#endif
}

inline int hardware_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace discrep
