#include "banditlab/parallel.hpp"

#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace banditlab::par {

namespace {

int env_thread_cap() {
  const char* v = std::getenv("BANDITLAB_THREADS");
  if (v == nullptr) return 0;
  const int n = std::atoi(v);
  return n > 0 ? n : 0;
}

bool env_force_serial() {
  const char* v = std::getenv("BANDITLAB_SERIAL");
  return v != nullptr && std::string(v) == "1";
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
  const int cap = env_thread_cap();
  if (cap > 0 && cap < n) n = cap;
  return n < 1 ? 1 : n;
#else
  return 1;
#endif
}

bool enabled() {
#ifdef _OPENMP
  return !env_force_serial() && max_threads() > 1;
#else
  return false;
#endif
}

std::pair<int, double> argmax_serial(int n, const std::function<double(int)>& f) {
  int best = -1;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double v = f(i);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  return {best, best_val};
}

std::pair<int, double> argmax_parallel(int n, const std::function<double(int)>& f) {
#ifdef _OPENMP
  const int threads = max_threads();
  std::vector<int> idx(threads, -1);
  std::vector<double> val(threads, -std::numeric_limits<double>::infinity());
#pragma omp parallel num_threads(threads)
  {
    const int tid = omp_get_thread_num();
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i) {
      const double v = f(i);
      if (v > val[tid]) {
        val[tid] = v;
        idx[tid] = i;
      }
    }
  }
  // Combine in index order: strict > keeps the lowest winning index, matching
  // the serial scan exactly.
  int best = -1;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < threads; ++t) {
    if (idx[t] < 0) continue;
    if (val[t] > best_val || (val[t] == best_val && (best < 0 || idx[t] < best))) {
      best_val = val[t];
      best = idx[t];
    }
  }
  return {best, best_val};
#else
  return argmax_serial(n, f);
#endif
}

std::pair<int, double> argmax(int n, const std::function<double(int)>& f) {
  if (enabled() && n >= 64) return argmax_parallel(n, f);
  return argmax_serial(n, f);
}

void for_each_trial(int n, const std::function<void(int)>& fn) {
#ifdef _OPENMP
  if (enabled()) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_threads())
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
#endif
  for (int i = 0; i < n; ++i) fn(i);
}

}  // namespace banditlab::par
