#pragma once
// Per-round policies for large-action contextual bandits: SpannerGreedy,
// SpannerIGW (exact normalization and the practical sampling variant),
// SmoothIGW via rejection sampling, and the CORRAL master over smoothness
// levels.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "banditlab/distribution.hpp"
#include "banditlab/instance.hpp"
#include "banditlab/regress.hpp"
#include "banditlab/run_record.hpp"
#include "banditlab/spanner.hpp"

namespace banditlab::cb {

struct IgwConfig {
  double gamma = 1.0;     // exploration parameter, > 0
  double spanner_C = 2.0; // barycentric spanner approximation factor
  double c_opt = 0.0;     // design approximation factor; 0 = C^2 * d
  double epsilon = 0.0;   // SpannerGreedy mix; 0 = sqrt(c_opt d / 4 gamma) ∧ 1
  double h = 1.0;         // smoothness level for SmoothIGW, in (0, 1]

  double copt_for(int d) const {
    return c_opt > 0.0 ? c_opt : spanner_C * spanner_C * d;
  }
  double eta_for(int d) const { return gamma / (copt_for(d) * d); }
  double epsilon_for(int d) const {
    if (epsilon > 0.0) return epsilon;
    const double e = std::sqrt(copt_for(d) * d / (4.0 * gamma));
    return e < 1.0 ? e : 1.0;
  }
};

enum class IgwMode { Exact, Practical };

// epsilon * design + (1 - epsilon) * point mass at the greedy action.
ActionDistribution spanner_greedy_policy(const ActionDistribution& design,
                                         int greedy_action, double epsilon);

// Unique lambda in [1/2, 1] with sum_a q(a) / (lambda + eta * gap(a)) = 1,
// by bisection to 1e-10. Requires gaps >= 0 with the greedy gap 0 and
// q(greedy) >= 1/2.
double solve_lambda(std::span<const double> gaps, std::span<const double> q_weights,
                    double eta);

struct IgwRound {
  ActionDistribution dist;
  int greedy = -1;
  spanner::SpannerSet span;
  bool clamped = false;  // practical mode drove the remainder mass below 0
};

// One round of SpannerIGW for a fixed context, given the oracle's linear
// context embedding ghat (f_hat(a) = <phi(a), ghat>).
IgwRound spanner_igw_round(const std::vector<Vec>& embeddings, const Vec& ghat,
                           const IgwConfig& cfg, IgwMode mode);

// One round of SpannerGreedy (spanner computed on the raw embeddings).
IgwRound spanner_greedy_round(const std::vector<Vec>& embeddings, const Vec& ghat,
                              const IgwConfig& cfg);

// Closed-form SmoothIGW sampling law over K actions with uniform base measure:
// P(a) = m(a)/K + 1{a = greedy} (1 - sum_b m(b)/K).
std::vector<double> smooth_igw_distribution(std::span<const double> fhat_losses,
                                            double gamma, double h);

// Rejection-sampled action: draw a ~ uniform, accept with probability
// 1 / (1 + h*gamma*(fhat(a) - fhat(greedy))), else play greedy.
int smooth_igw_action(std::span<const double> fhat_losses, double gamma, double h,
                      Rng& rng);

// CORRAL master state: log-barrier mirror descent over base algorithms with
// the learning-rate doubling rule and rho tracking.
class CorralMaster {
 public:
  CorralMaster(int num_bases, double eta_master, std::int64_t horizon);

  int sample(Rng& rng);                    // I_t ~ smoothed distribution
  double q(int b) const { return qbar_[b]; }
  double rho(int b) const { return rho_[b]; }
  const std::vector<double>& distribution() const { return qbar_; }

  // Importance-weighted loss update; loss is the raw observed loss in [0,1]
  // for the sampled base.
  void update(int sampled, double loss);

 private:
  std::vector<double> q_, qbar_, eta_, rho_;
  double mix_, beta_;
};

// Full-run helpers over a ContextualInstance with a shared linear context
// embedding (g*(x) = theta). Used by tests and the harness.
struct CbRunResult {
  std::vector<int> actions;  // chosen action per round (context-local index)
  double cum_regret = 0.0;   // pseudo-regret against the per-context best
  int clamped_rounds = 0;
};

CbRunResult run_spanner_greedy(const ContextualInstance& inst, std::int64_t T,
                               const IgwConfig& cfg, std::uint64_t seed);
CbRunResult run_spanner_igw(const ContextualInstance& inst, std::int64_t T,
                            const IgwConfig& cfg, IgwMode mode, std::uint64_t seed);

// Smooth regret accounting for SmoothIGW runs: benchmark per round is the
// smoothed loss optimum of the true means.
struct SmoothRunResult {
  double cum_smooth_regret = 0.0;
  double cum_loss = 0.0;
  std::int64_t rounds = 0;
};

// Stable base: SmoothIGW with the master-supplied (q, rho) and a weighted
// finite-class oracle.
class SmoothIgwBase {
 public:
  SmoothIgwBase(double h, double regsq, std::int64_t horizon, FiniteClassOracle oracle);

  int act(const ContextualInstance& inst, int ctx, double q, double rho, Rng& rng);
  void observe(int ctx, int action, double loss);
  const FiniteClassOracle& oracle() const { return oracle_; }

 private:
  double h_, regsq_;
  std::int64_t horizon_;
  double last_weight_ = 0.0;
  FiniteClassOracle oracle_;
};

struct CorralRunResult {
  SmoothRunResult smooth;
  std::vector<double> final_q;
  std::vector<int> base_pulls;
};

// CORRAL over B = ceil(log2 T) SmoothIGW bases with h_b = 2^-b. A factory
// supplies each base its own regression oracle; eval_h sets the smoothness
// level used for regret accounting.
CorralRunResult corral_adapt(const ContextualInstance& inst, std::int64_t T,
                             double eta_master, std::uint64_t seed, double regsq,
                             const std::function<FiniteClassOracle()>& oracle_factory,
                             int num_bases = 0, double eval_h = 1.0);

// Single stable base run with fixed (q, rho), for pass-through comparisons.
CorralRunResult run_single_smooth_base(const ContextualInstance& inst, std::int64_t T,
                                       double h, std::uint64_t seed, double regsq,
                                       const std::function<FiniteClassOracle()>& oracle_factory,
                                       double q = 1.0, double rho = 2.0);

}  // namespace banditlab::cb
