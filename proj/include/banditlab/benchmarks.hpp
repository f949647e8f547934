#pragma once
// Benchmark evaluation: Chow's excess error over a finite weighted pool and
// the smoothed-loss benchmark over a finite action list.

#include <span>
#include <string>
#include <vector>

namespace banditlab {

// Finite weighted pool standing in for the marginal D_X; eta(x) is the
// conditional probability of label 1.
struct LabelPool {
  std::vector<double> weights;  // nonnegative, sum to 1
  std::vector<double> eta;      // in [0, 1]

  int size() const { return static_cast<int>(eta.size()); }
  void validate() const;
};

enum class Decision : char { Zero = 0, One = 1, Abstain = 2 };

// Bayes error sum_x w(x) * min(eta, 1-eta).
double bayes_error(const LabelPool& pool);

// Chow's error of a deterministic abstaining classifier at abstention price
// 1/2 - gamma, computed exactly by summation over the pool.
double chow_error(std::span<const Decision> classifier, const LabelPool& pool,
                  double gamma);

// err_gamma(h) - err(h*); gamma must lie in (0, 1/2).
double chow_excess(std::span<const Decision> classifier, const LabelPool& pool,
                   double gamma);

// Randomized classifier given by per-point action probabilities
// (p0, p1, p_abstain); rows sum to 1.
struct RandomizedClassifier {
  std::vector<double> p0, p1, pa;
};
double chow_excess(const RandomizedClassifier& classifier, const LabelPool& pool,
                   double gamma);

// Standard (non-abstaining) error where abstentions are replaced by a fair
// coin; exact closed form.
double randomized_standard_error(std::span<const Decision> classifier,
                                 const LabelPool& pool);

// Smallest expected loss achievable by a distribution over the K actions with
// per-atom mass at most 1/(h*K): greedy fill over sorted losses.
double smooth_benchmark(std::span<const double> losses, double h);

}  // namespace banditlab
