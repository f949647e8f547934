#pragma once
// Online squared-loss regression oracles: exponential-weights aggregation over
// a finite class, and recursive ridge regression for linear classes. Both
// accept weighted updates.

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "banditlab/instance.hpp"

namespace banditlab {

// Member functions map a (context, action) index pair to a prediction in [0,1].
using MemberFn = std::function<double(int context, int action)>;

class FiniteClassOracle {
 public:
  explicit FiniteClassOracle(std::vector<MemberFn> members);

  int size() const { return static_cast<int>(members_.size()); }

  // Log-weight-weighted mean prediction, clipped to [0,1].
  double predict(int context, int action) const;

  // Weighted square-loss update; aggregation learning rate 1/2.
  void update(double weight, int context, int action, double value);

  // (lcb, ucb) of member predictions over the active set
  // {f : cum_loss(f) <= min cum_loss + beta}.
  std::pair<double, double> confidence_range(double beta, int context, int action) const;

  double member_prediction(int f, int context, int action) const {
    return members_[f](context, action);
  }
  double cum_loss(int f) const { return cum_sq_loss_[f]; }
  double min_cum_loss() const;
  int best_member() const;  // argmin cumulative loss, lowest index

 private:
  std::vector<MemberFn> members_;
  std::vector<double> cum_sq_loss_;
  std::vector<double> log_weights_;
};

class RidgeOracle {
 public:
  explicit RidgeOracle(int dim, double ridge_lambda = 1.0);

  int dim() const { return static_cast<int>(gram_.rows()); }

  // <theta_hat, phi> clipped to [0,1].
  double predict(const Vec& phi) const;

  // Current ridge estimate (lazy solve of gram * theta = moment).
  const Vec& estimate() const;

  void update(double weight, const Vec& phi, double value);

 private:
  Mat gram_;
  Vec moment_;
  mutable Vec theta_;
  mutable bool dirty_ = true;
};

}  // namespace banditlab
