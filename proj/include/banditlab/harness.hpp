#pragma once
// Instance generators matching the experiment setups, the seeded experiment
// runner, metrics (bootstrap CIs, unverifiable sample complexity), and the
// config/file surface behind the CLI.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "banditlab/al_abstain.hpp"
#include "banditlab/instance.hpp"

namespace banditlab::harness {

// --------------------------------------------------------------------------
// Generators

// n Bernoulli arms, m = ceil(n / (2 T^alpha)) best arms at `best_mean`,
// the rest spread evenly over `sub_means`; arm order shuffled by rng.
Instance gen_multiple_best_arms(int n, double alpha, std::int64_t T, Rng& rng,
                                double best_mean = 0.9,
                                std::vector<double> sub_means = {0.1, 0.2, 0.3, 0.4,
                                                                 0.5});

// Caption-style synthetic: n arms, m best at `best_mean`.
Instance gen_caption_style(int n, int m, Rng& rng, double best_mean = 0.9,
                           std::vector<double> sub_means = {0.1, 0.2, 0.3, 0.4, 0.5});

// K arms uniform in the d-ball, theta* = 1/sqrt(dstar) on the first dstar
// coordinates, gaussian noise.
Instance gen_linear_intrinsic(int d, int K, int dstar, double sigma, Rng& rng);

// The hard pure-exploration instance: X = Z = {e_1..e_dstar,
// (1-eps) e_dstar + e_(dstar+1)}, theta* = e_dstar, sigma = 1 gaussian.
Instance gen_hard_instance(int dstar, double eps);

// Appends `copies` duplicates of the final action.
Instance gen_duplicate_augmented(const Instance& base, int copies);

// Massart pool: `points` pool points with eta alternating between lo and hi,
// class = all lo/hi labelings of a seed pattern set including the truth.
al::AlInstance gen_massart_pool(int points, double lo, double hi, int members,
                                Rng& rng);

// Noise-seeking pool: hard mass at eta = 1/2 (phi2 = 0), easy mass p at
// eta = theta1 + theta2; class = grid over theta1 x {-1/2, +1/2}.
al::AlInstance gen_noise_seeking(double p_easy, int theta1_grid, double theta1_halfwidth);

// Pool with eta within kappa of a class member (for the misspecified runs).
al::AlInstance gen_perturbed_realizable(int points, double kappa, Rng& rng);

// AL pool file: "N M" header, N lines "weight eta", M lines of N predictions,
// optional trailing "truth=<i> kappa=<f>".
void save_al_instance(const al::AlInstance& inst, const std::string& path);
al::AlInstance load_al_instance(const std::string& path);

// --------------------------------------------------------------------------
// Metrics

// Percentile bootstrap CI for the mean.
std::pair<double, double> bootstrap_ci(std::span<const double> samples, double level,
                                       int resamples, Rng& rng);

// Smallest tau such that the recommendation is correct and unchanged over all
// recorded events in (tau, cap]; nullopt when the trace ends wrong.
std::optional<std::int64_t> estimate_tau(
    const std::vector<std::pair<std::int64_t, int>>& trace, int truth,
    std::int64_t cap);

// --------------------------------------------------------------------------
// Experiment surface

struct ExperimentConfig {
  std::string algo;                          // run-subcommand algorithm id
  std::map<std::string, std::string> params; // flat key=value options
  int trials = 1;
  std::uint64_t seed = 0;
  std::int64_t horizon = 0;
  std::string instance_path;                 // optional; some algos generate
  std::string out_path;

  double param_d(const std::string& key, double fallback) const;
  std::int64_t param_i(const std::string& key, std::int64_t fallback) const;
  std::string param_s(const std::string& key, const std::string& fallback) const;
};

// Long-format metric rows; '#'-prefixed metadata lines precede one header.
struct MetricTable {
  std::vector<std::string> meta;
  struct Row {
    int trial;
    std::int64_t t;
    std::string metric;
    double value;
  };
  std::vector<Row> rows;

  void write(const std::string& path) const;
  std::string to_string() const;
};

// Runs `trials` seeded trials of the configured algorithm (trial rng seeded
// with seed ^ trial); deterministic byte-identical output for equal configs.
MetricTable run_experiment(const ExperimentConfig& cfg);

// Flat "key = value" config file; '#' comments allowed.
std::map<std::string, std::string> parse_config_file(const std::string& path);

}  // namespace banditlab::harness
