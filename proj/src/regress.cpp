#include "banditlab/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace banditlab {

FiniteClassOracle::FiniteClassOracle(std::vector<MemberFn> members)
    : members_(std::move(members)),
      cum_sq_loss_(members_.size(), 0.0),
      log_weights_(members_.size(), 0.0) {
  if (members_.empty()) throw std::invalid_argument("FiniteClassOracle: empty class");
}

double FiniteClassOracle::predict(int context, int action) const {
  double max_lw = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights_) max_lw = std::max(max_lw, lw);
  double num = 0.0, den = 0.0;
  for (std::size_t f = 0; f < members_.size(); ++f) {
    const double w = std::exp(log_weights_[f] - max_lw);
    num += w * members_[f](context, action);
    den += w;
  }
  return std::clamp(num / den, 0.0, 1.0);
}

void FiniteClassOracle::update(double weight, int context, int action, double value) {
  if (weight < 0.0) throw std::invalid_argument("FiniteClassOracle: negative weight");
  if (weight == 0.0) return;
  for (std::size_t f = 0; f < members_.size(); ++f) {
    const double err = members_[f](context, action) - value;
    const double loss = weight * err * err;
    cum_sq_loss_[f] += loss;
    log_weights_[f] -= 0.5 * loss;  // squared loss is 1/2-exp-concave on [0,1]
  }
}

double FiniteClassOracle::min_cum_loss() const {
  return *std::min_element(cum_sq_loss_.begin(), cum_sq_loss_.end());
}

int FiniteClassOracle::best_member() const {
  int best = 0;
  for (int f = 1; f < size(); ++f)
    if (cum_sq_loss_[f] < cum_sq_loss_[best]) best = f;
  return best;
}

std::pair<double, double> FiniteClassOracle::confidence_range(double beta, int context,
                                                              int action) const {
  if (beta < 0.0) throw std::invalid_argument("confidence_range: beta < 0");
  const double threshold = min_cum_loss() + beta;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < members_.size(); ++f) {
    if (cum_sq_loss_[f] > threshold) continue;
    const double p = members_[f](context, action);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  return {lo, hi};
}

RidgeOracle::RidgeOracle(int dim, double ridge_lambda) {
  if (dim <= 0) throw std::invalid_argument("RidgeOracle: dim <= 0");
  if (ridge_lambda <= 0.0) throw std::invalid_argument("RidgeOracle: lambda <= 0");
  gram_ = ridge_lambda * Mat::Identity(dim, dim);
  moment_ = Vec::Zero(dim);
  theta_ = Vec::Zero(dim);
  dirty_ = false;
}

const Vec& RidgeOracle::estimate() const {
  if (dirty_) {
    theta_ = gram_.ldlt().solve(moment_);
    dirty_ = false;
  }
  return theta_;
}

double RidgeOracle::predict(const Vec& phi) const {
  return std::clamp(estimate().dot(phi), 0.0, 1.0);
}

void RidgeOracle::update(double weight, const Vec& phi, double value) {
  if (weight < 0.0) throw std::invalid_argument("RidgeOracle: negative weight");
  if (weight == 0.0) return;
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(phi, weight);
  gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
  moment_ += weight * value * phi;
  dirty_ = true;
}

}  // namespace banditlab
