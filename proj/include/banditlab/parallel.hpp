#pragma once
// OpenMP helpers. Every parallel kernel has a serial twin with identical
// floating-point behavior; tests compare the two and the bench tool times them.
// BANDITLAB_THREADS caps the thread count, BANDITLAB_SERIAL=1 forces the
// serial paths at runtime.

#include <cstdint>
#include <functional>
#include <utility>

namespace banditlab::par {

// Thread cap from BANDITLAB_THREADS (or OpenMP default); 1 when built serial.
int max_threads();

// True unless BANDITLAB_SERIAL=1 or compiled without OpenMP.
bool enabled();

// Deterministic argmax of f(i) over [0, n): ties go to the lowest index
// regardless of thread count. Returns {index, value}; {-1, -inf} when n == 0.
std::pair<int, double> argmax_serial(int n, const std::function<double(int)>& f);
std::pair<int, double> argmax_parallel(int n, const std::function<double(int)>& f);
std::pair<int, double> argmax(int n, const std::function<double(int)>& f);

// Runs fn(trial) for trial in [0, n). Trials must be independent; results
// belong in pre-allocated per-trial slots so the merge order is fixed.
void for_each_trial(int n, const std::function<void(int)>& fn);

}  // namespace banditlab::par
