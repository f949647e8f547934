// Times the OpenMP kernels against their serial references: the design-solver
// quadratic-form scan, a full Frank-Wolfe solve, and a batch of MOSS++ trials.

#include <chrono>
#include <cstdio>
#include <vector>

#include "banditlab/harness.hpp"
#include "banditlab/ms_regret.hpp"
#include "banditlab/parallel.hpp"
#include "banditlab/pe_select.hpp"

using namespace banditlab;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void bench_quadform() {
  Rng rng(1);
  const int d = 64, n = 20000;
  std::vector<Vec> dirs;
  dirs.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec v(d);
    for (int j = 0; j < d; ++j) v[j] = rng.normal();
    dirs.push_back(std::move(v));
  }
  Mat a = Mat::Identity(d, d);
  for (int i = 0; i < 4 * d; ++i) {
    Vec v(d);
    for (int j = 0; j < d; ++j) v[j] = rng.normal();
    a += v * v.transpose() / (4.0 * d);
  }
  const Mat ainv = a.inverse();

  const int reps = 20;
  auto t0 = Clock::now();
  std::pair<int, double> rs{0, 0.0};
  for (int r = 0; r < reps; ++r) rs = pe::max_quadform_serial(dirs, ainv);
  const double ts = seconds_since(t0);
  t0 = Clock::now();
  std::pair<int, double> rp{0, 0.0};
  for (int r = 0; r < reps; ++r) rp = pe::max_quadform_parallel(dirs, ainv);
  const double tp = seconds_since(t0);
  std::printf("quadform argmax (d=%d, n=%d, x%d)   serial %8.3fs  omp %8.3fs  (%.2fx)%s\n",
              d, n, reps, ts, tp, ts / tp,
              rs == rp ? "" : "  MISMATCH");
}

void bench_fw() {
  Rng rng(2);
  Instance inst = harness::gen_linear_intrinsic(24, 120, 24, 1.0, rng);
  pe::DesignProblem prob;
  prob.actions = inst.action_features;
  for (int i = 0; i < inst.num_targets(); ++i)
    for (int j = i + 1; j < inst.num_targets(); ++j)
      prob.directions.push_back(inst.target_features[i] - inst.target_features[j]);
  prob.max_iter = 200;

  setenv("BANDITLAB_SERIAL", "1", 1);
  auto t0 = Clock::now();
  const auto rs = pe::fw_optimal_design(prob);
  const double ts = seconds_since(t0);
  unsetenv("BANDITLAB_SERIAL");
  t0 = Clock::now();
  const auto rp = pe::fw_optimal_design(prob);
  const double tp = seconds_since(t0);
  std::printf("frank-wolfe design (d=24, K=120, %zu dirs)  serial %8.3fs  omp %8.3fs  (%.2fx)%s\n",
              prob.directions.size(), ts, tp, ts / tp,
              rs.value == rp.value ? "" : "  MISMATCH");
}

void bench_trials() {
  Rng gen(3);
  Instance inst = harness::gen_caption_style(2000, 54, gen);
  const int trials = 8;
  auto run_all = [&](std::vector<double>& out) {
    par::for_each_trial(trials, [&](int i) {
      Rng rng = Rng::for_trial(99, static_cast<std::uint64_t>(i));
      out[i] = ms::mosspp_run(inst, 20000, 0.5, ms::MossppVariant::Empirical, rng)
                   .cum_regret;
    });
  };
  std::vector<double> serial_out(trials), omp_out(trials);
  setenv("BANDITLAB_SERIAL", "1", 1);
  auto t0 = Clock::now();
  run_all(serial_out);
  const double ts = seconds_since(t0);
  unsetenv("BANDITLAB_SERIAL");
  t0 = Clock::now();
  run_all(omp_out);
  const double tp = seconds_since(t0);
  std::printf("empMOSS++ batch (%d trials, T=20000)       serial %8.3fs  omp %8.3fs  (%.2fx)%s\n",
              trials, ts, tp, ts / tp, serial_out == omp_out ? "" : "  MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", par::max_threads());
  bench_quadform();
  bench_fw();
  bench_trials();
  return 0;
}
