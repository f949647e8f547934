#pragma once
// Pure-exploration model selection: Frank-Wolfe G-optimal design over
// direction sets, rounding, adaptive dimension selection, the GEMS
// elimination subroutines (fixed confidence, fixed budget, misspecification-
// robust), the two-dimensional doubling wrappers, and rho*-style complexity
// evaluation.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "banditlab/distribution.hpp"
#include "banditlab/instance.hpp"

namespace banditlab::pe {

inline double rounding_budget(int d, double zeta) {
  return (static_cast<double>(d) * d + d + 2.0) / zeta;
}

constexpr double kZeta = 1.0;  // rounding slack used throughout
constexpr double kInfValue = 1e300;

// ---------------------------------------------------------------------------
// Optimal design

struct DesignProblem {
  std::vector<Vec> actions;     // embeddings, already truncated
  std::vector<Vec> directions;  // must lie in span(actions), else value = inf
  double tolerance = 0.01;      // relative value change stopping rule
  int max_iter = 1000;
};

struct DesignResult {
  std::vector<double> lambda;  // over actions
  double value = kInfValue;    // sup_y ||y||^2_{A(lambda)^+}
  int iterations = 0;
};

// Frank-Wolfe with constant step 2/(k+2), pseudo-inverse semantics, and a
// 1e-3 uniform mixing floor during iteration (removed at evaluation).
DesignResult fw_optimal_design(const DesignProblem& problem);

// max_y y' Ainv y over the direction list; ties to the lowest index. The
// parallel version is the OpenMP kernel, the serial one its reference.
std::pair<int, double> max_quadform_serial(const std::vector<Vec>& directions,
                                           const Mat& ainv);
std::pair<int, double> max_quadform_parallel(const std::vector<Vec>& directions,
                                             const Mat& ainv);

// Quadratic form value of a single direction against a design given as
// per-action counts/weights; pseudo-inverse semantics.
double design_value(const std::vector<Vec>& actions, const std::vector<double>& weights,
                    const std::vector<Vec>& directions);

// ---------------------------------------------------------------------------
// Rounding

// Pukelsheim efficient apportionment plus greedy repair. Returns per-action
// pull counts summing to N. Throws when N < r_d(zeta) or the certificate
// max_y ||y||^2 <= (1+zeta) value/N cannot be met.
std::vector<std::int64_t> round_design(const std::vector<double>& lambda,
                                       std::int64_t N, int d, double zeta,
                                       const std::vector<Vec>& actions,
                                       const std::vector<Vec>& directions);

// ---------------------------------------------------------------------------
// Dimension selection

// Largest d <= d_cap with g(d) <= budget; descending linear scan by default,
// binary search when `assume_monotone` (the fast mode). nullopt if none.
std::optional<int> opt_dim(double budget, int d_cap,
                           const std::function<double(int)>& g,
                           bool assume_monotone = false);

// ---------------------------------------------------------------------------
// Elimination subroutines

struct BudgetExhausted {};

struct SampleBudget {
  std::int64_t cap = INT64_MAX;
  std::int64_t used = 0;
  void spend(std::int64_t n) {
    if (used + n > cap) {
      used = cap;
      throw BudgetExhausted{};
    }
    used += n;
  }
};

enum class GemsMode { Exact, Robust };

struct ElimState {
  std::vector<int> survivors;          // indices into the target set
  int rounds_done = 0;
  std::vector<int> chosen_dims;        // d_k per round
  std::int64_t samples = 0;
  bool dim_infeasible = false;         // opt_dim failed at some round
};

// GEMS fixed-confidence subroutine: n elimination rounds with per-round
// dimension selection under budget B. Robust mode uses the 2^-k elimination
// threshold and an 8x sample inflation.
ElimState gems_fc_run(const Instance& inst, int n, double B, double delta,
                      GemsMode mode, Rng& rng, SampleBudget& budget);

// GEMS fixed-budget subroutine: floor(T/n) samples per round, elimination at
// threshold 2^-k; returns the surviving arm with the best last-round estimate.
int gems_fb_run(const Instance& inst, double T, int n, double B, Rng& rng);

// ---------------------------------------------------------------------------
// Adaptive wrappers

struct RecommendationTrace {
  std::vector<std::pair<std::int64_t, int>> events;  // (samples used, recommended)
  std::int64_t total_samples = 0;

  int final_recommendation() const {
    return events.empty() ? -1 : events.back().second;
  }
};

// Fixed-confidence doubling over (n_i, B_i) diagonals; emits a recommendation
// event whenever the recommended arm changes. Runs until the sample cap.
RecommendationTrace adaptive_fc_run(const Instance& inst, double delta, GemsMode mode,
                                    Rng& rng, std::int64_t sample_cap,
                                    double epsilon = 0.0);

// Fixed-budget selection + validation with total budget 2T.
int adaptive_fb_run(const Instance& inst, std::int64_t two_T, Rng& rng);

// RAGE-style fixed-dimension elimination baseline (no model selection);
// produces a recommendation trace against the same sample cap.
RecommendationTrace rage_run(const Instance& inst, double delta, Rng& rng,
                             std::int64_t sample_cap);

// Solves p * 2^p = T for real p >= 0.
double lambert_base2(double T);

// ---------------------------------------------------------------------------
// Complexity evaluation

// rho*_d(eps): optimal-design value over gap-normalized directions to the
// best target. eps = 0 requires a unique best target.
double rho_star(const Instance& inst, int d, double epsilon);

// Worst-case deviation of the best d-dimensional linear fit to the true
// means over actions+targets (Chebyshev fit by Lawson iteration).
double misspec_gamma_tilde(const Instance& inst, int d);

// gamma(d): achievable optimality level at dimension d; +inf when even one
// round is infeasible.
double misspec_gamma(const Instance& inst, int d);

// Smallest d with gamma(d') <= eps for all d' >= d; nullopt if none.
std::optional<int> misspec_dstar(const Instance& inst, double eps);

}  // namespace banditlab::pe
