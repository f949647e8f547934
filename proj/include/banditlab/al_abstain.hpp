#pragma once
// Active learning with abstention over finite regression classes: the epoch
// algorithm, the constant-label-complexity per-round variant, the
// misspecification-robust variant, an uncertainty-sampling baseline, and
// abstention-to-standard-classifier conversion.

#include <cstdint>
#include <vector>

#include "banditlab/benchmarks.hpp"
#include "banditlab/rng.hpp"

namespace banditlab::al {

// Finite pool + finite class. members[f][x] is f's prediction at pool point x.
struct AlInstance {
  LabelPool pool;
  std::vector<std::vector<double>> members;
  int truth = -1;     // index of the realizable truth in members, -1 if none
  double kappa = 0.0; // declared misspecification bound

  int num_members() const { return static_cast<int>(members.size()); }
  void validate() const;
};

enum class AlAlgo { Epoch, Eluder, Misspecified, UncertaintyBaseline };

struct AlResult {
  std::vector<Decision> classifier;       // final epoch classifier over the pool
  RandomizedClassifier mixture;           // per-round mixture (eluder variant)
  std::int64_t labels = 0;
  std::int64_t rounds = 0;
  std::int64_t horizon = 0;
  bool truth_eliminated = false;          // truth left the active set at some epoch
  // (round, cumulative labels, running chow excess) rows for the CSV surface.
  std::vector<std::tuple<std::int64_t, std::int64_t, double>> csv_rows;
};

// Epoch algorithm: T = ceil(4 ln|F| / (eps*gamma)), M = ceil(log2 T) epochs,
// beta_m = (M-m+1) * C_delta with C_delta = 8 ln(|F| T / delta).
AlResult epoch_al_run(const AlInstance& inst, double epsilon, double gamma,
                      double delta, Rng& rng);

// Per-round variant with the fixed threshold beta = 2 ln(2|F|/delta); returns
// the uniform mixture over per-round classifiers. An explicit x-stream can
// replace i.i.d. pool draws (adaptive adversary).
AlResult eluder_al_run(const AlInstance& inst, std::int64_t T, double gamma,
                       double delta, Rng& rng,
                       const std::vector<int>* x_stream = nullptr);

// Misspecification-robust thresholds beta_m = (M-m+1)(2 eps^2 tau_{M-1} + 2 C_delta).
AlResult mis_al_run(const AlInstance& inst, double epsilon, double gamma,
                    double delta, Rng& rng);

// Epoch machinery without the abstention veto: queries whenever 1/2 sits
// strictly inside the active-set range. Comparison stub.
AlResult uncertainty_baseline_run(const AlInstance& inst, double epsilon, double gamma,
                                  double delta, Rng& rng);

// Active-set thresholds, exposed for the offline superset comparison.
std::vector<double> epoch_thresholds(const AlInstance& inst, double epsilon,
                                     double gamma, double delta, bool misspecified);

// Expected standard error after replacing abstentions by a fair coin;
// equals chow_excess + gamma * P(abstain) + bayes_error exactly.
double randomize_abstention_error(const std::vector<Decision>& classifier,
                                  const LabelPool& pool);

}  // namespace banditlab::al
