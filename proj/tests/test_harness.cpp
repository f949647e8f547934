#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "banditlab/harness.hpp"

using namespace banditlab;
using namespace banditlab::harness;

TEST_CASE("multiple-best-arms generator sizes m by the hardness level") {
  Rng rng(1);
  auto inst = gen_multiple_best_arms(2000, 0.25, 100000, rng);
  int best = 0;
  for (int a = 0; a < inst.num_actions(); ++a)
    if (inst.mean_of_action(a) >= 0.9 - 1e-12) ++best;
  const int expect = static_cast<int>(std::ceil(2000 / (2.0 * std::pow(100000.0, 0.25))));
  CHECK(best == expect);
  CHECK(inst.noise == NoiseKind::Bernoulli);
}

TEST_CASE("hard instance construction") {
  auto inst = gen_hard_instance(9, 1e-3);
  CHECK(inst.dim() == 10);
  CHECK(inst.num_actions() == 10);
  CHECK(inst.best_target() == 8);  // x_{d*}
  CHECK(inst.mean_of_target(8) == doctest::Approx(1.0));
  CHECK(inst.mean_of_target(9) == doctest::Approx(1.0 - 1e-3));
  for (int z = 0; z < 8; ++z) CHECK(inst.mean_of_target(z) == doctest::Approx(0.0));
}

TEST_CASE("duplicate augmentation with zero copies is the identity") {
  Rng rng(3);
  auto base = gen_linear_intrinsic(4, 10, 2, 0.1, rng);
  auto same = gen_duplicate_augmented(base, 0);
  CHECK(same.num_actions() == base.num_actions());
  auto more = gen_duplicate_augmented(base, 16);
  CHECK(more.num_actions() == base.num_actions() + 16);
  for (int c = 0; c < 16; ++c)
    CHECK((more.action_features[base.num_actions() + c] -
           base.action_features.back()).norm() == 0.0);
}

TEST_CASE("bootstrap_ci basics") {
  Rng rng(5);
  std::vector<double> constant(10, 3.25);
  auto [lo, hi] = bootstrap_ci(constant, 0.9, 500, rng);
  CHECK(lo == doctest::Approx(3.25));
  CHECK(hi == doctest::Approx(3.25));

  std::vector<double> two{0.0, 1.0};
  auto [l2, h2] = bootstrap_ci(two, 0.9, 500, rng);
  CHECK(l2 >= 0.0);
  CHECK(h2 <= 1.0);
  std::vector<double> one{1.0};
  CHECK_THROWS(bootstrap_ci(one, 0.9, 100, rng));
}

TEST_CASE("bootstrap_ci coverage near the nominal level") {
  Rng rng(7);
  const int meta_trials = 500, n = 1000;
  int covered = 0;
  std::vector<double> sample(n);
  for (int m = 0; m < meta_trials; ++m) {
    for (double& s : sample) s = rng.normal();
    auto [lo, hi] = bootstrap_ci(sample, 0.9, 300, rng);
    if (lo <= 0.0 && 0.0 <= hi) ++covered;
  }
  const double rate = static_cast<double>(covered) / meta_trials;
  CHECK(rate >= 0.85);
  CHECK(rate <= 0.95);
}

TEST_CASE("estimate_tau cases") {
  using Trace = std::vector<std::pair<std::int64_t, int>>;
  Trace correct_from_start{{0, 1}, {10, 1}};
  CHECK(estimate_tau(correct_from_start, 1, 100).value() == 0);

  Trace flips_late{{0, 1}, {99, 0}};
  CHECK(!estimate_tau(flips_late, 1, 100).has_value());

  Trace settle{{0, 0}, {5, 1}, {9, 0}, {20, 1}};
  CHECK(estimate_tau(settle, 1, 100).value() == 20);
}

TEST_CASE("run_experiment is byte-identical across repeats and thread settings") {
  ExperimentConfig cfg;
  cfg.algo = "mosspp";
  cfg.trials = 3;
  cfg.seed = 99;
  cfg.horizon = 2048;
  cfg.params["n"] = "100";
  cfg.params["alpha"] = "0.3";
  const auto a = run_experiment(cfg).to_string();
  const auto b = run_experiment(cfg).to_string();
  CHECK(a == b);
  setenv("BANDITLAB_SERIAL", "1", 1);
  const auto c = run_experiment(cfg).to_string();
  unsetenv("BANDITLAB_SERIAL");
  CHECK(a == c);
  CHECK(a.find("trial,t,metric,value") != std::string::npos);
}

TEST_CASE("run_experiment regret rows are nondecreasing within a trial") {
  ExperimentConfig cfg;
  cfg.algo = "moss";
  cfg.trials = 2;
  cfg.seed = 11;
  cfg.horizon = 1024;
  cfg.params["n"] = "64";
  const auto table = run_experiment(cfg);
  double prev = -1e300;
  int trial = -2;
  for (const auto& row : table.rows) {
    if (row.metric != "cum_regret") continue;
    if (row.trial != trial) {
      trial = row.trial;
      prev = -1e300;
    }
    CHECK(row.value >= prev - 1e-9);
    prev = row.value;
  }
}

TEST_CASE("run_experiment single arm single round") {
  // One arm: a single row of zero regret.
  ExperimentConfig cfg;
  cfg.algo = "moss";
  cfg.trials = 1;
  cfg.seed = 0;
  cfg.horizon = 1;
  Instance one;
  Vec v(1);
  v[0] = 1.0;
  one.action_features = {v};
  one.target_features = {v};
  one.theta_star = v;
  one.intrinsic_dim = 1;
  one.noise = NoiseKind::Bernoulli;
  save_instance(one, "single_arm.txt");
  cfg.instance_path = "single_arm.txt";
  const auto table = run_experiment(cfg);
  bool found = false;
  for (const auto& row : table.rows)
    if (row.metric == "final_regret") {
      CHECK(row.value == doctest::Approx(0.0));
      found = true;
    }
  CHECK(found);
  std::remove("single_arm.txt");
}

TEST_CASE("config file parsing") {
  {
    std::ofstream os("test_cfg.txt");
    os << "algo = mosspp\n";
    os << "# comment line\n";
    os << "beta = 0.5  # trailing comment\n";
    os << "T = 4096\n";
  }
  auto cfg = parse_config_file("test_cfg.txt");
  CHECK(cfg["algo"] == "mosspp");
  CHECK(cfg["beta"] == "0.5");
  CHECK(cfg["T"] == "4096");
  std::remove("test_cfg.txt");
}
