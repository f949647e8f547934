#include "banditlab/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace banditlab {

void LabelPool::validate() const {
  if (weights.size() != eta.size() || eta.empty())
    throw std::invalid_argument("LabelPool: bad shape");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("LabelPool: negative weight");
    if (eta[i] < 0.0 || eta[i] > 1.0) throw std::invalid_argument("LabelPool: eta outside [0,1]");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("LabelPool: weights do not sum to 1");
}

double bayes_error(const LabelPool& pool) {
  double err = 0.0;
  for (int i = 0; i < pool.size(); ++i)
    err += pool.weights[i] * std::min(pool.eta[i], 1.0 - pool.eta[i]);
  return err;
}

double chow_error(std::span<const Decision> classifier, const LabelPool& pool,
                  double gamma) {
  if (!(gamma > 0.0 && gamma < 0.5))
    throw std::invalid_argument("chow_error: gamma outside (0, 1/2)");
  if (static_cast<int>(classifier.size()) != pool.size())
    throw std::invalid_argument("chow_error: classifier/pool size mismatch");
  double err = 0.0;
  for (int i = 0; i < pool.size(); ++i) {
    switch (classifier[i]) {
      case Decision::Abstain: err += pool.weights[i] * (0.5 - gamma); break;
      case Decision::One: err += pool.weights[i] * (1.0 - pool.eta[i]); break;
      case Decision::Zero: err += pool.weights[i] * pool.eta[i]; break;
    }
  }
  return err;
}

double chow_excess(std::span<const Decision> classifier, const LabelPool& pool,
                   double gamma) {
  return chow_error(classifier, pool, gamma) - bayes_error(pool);
}

double chow_excess(const RandomizedClassifier& classifier, const LabelPool& pool,
                   double gamma) {
  if (!(gamma > 0.0 && gamma < 0.5))
    throw std::invalid_argument("chow_excess: gamma outside (0, 1/2)");
  if (static_cast<int>(classifier.p0.size()) != pool.size())
    throw std::invalid_argument("chow_excess: classifier/pool size mismatch");
  double err = 0.0;
  for (int i = 0; i < pool.size(); ++i) {
    err += pool.weights[i] * (classifier.p0[i] * pool.eta[i] +
                              classifier.p1[i] * (1.0 - pool.eta[i]) +
                              classifier.pa[i] * (0.5 - gamma));
  }
  return err - bayes_error(pool);
}

double randomized_standard_error(std::span<const Decision> classifier,
                                 const LabelPool& pool) {
  double err = 0.0;
  for (int i = 0; i < pool.size(); ++i) {
    switch (classifier[i]) {
      case Decision::Abstain: err += pool.weights[i] * 0.5; break;
      case Decision::One: err += pool.weights[i] * (1.0 - pool.eta[i]); break;
      case Decision::Zero: err += pool.weights[i] * pool.eta[i]; break;
    }
  }
  return err;
}

double smooth_benchmark(std::span<const double> losses, double h) {
  if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("smooth_benchmark: h outside (0,1]");
  const int K = static_cast<int>(losses.size());
  if (K == 0) throw std::invalid_argument("smooth_benchmark: empty losses");
  const double cap = 1.0 / (h * K);  // per-atom mass bound under uniform base measure
  if (cap >= 1.0) {
    return *std::min_element(losses.begin(), losses.end());
  }
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return losses[a] < losses[b]; });
  double value = 0.0, mass_left = 1.0;
  for (int i : order) {
    const double take = std::min(cap, mass_left);
    value += take * losses[i];
    mass_left -= take;
    if (mass_left <= 1e-15) break;
  }
  return value;
}

}  // namespace banditlab
