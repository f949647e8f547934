#pragma once
// Finitely supported probability assignment over actions. Universal policy
// output: optimal designs, IGW distributions, master/base mixtures.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "banditlab/rng.hpp"

namespace banditlab {

struct ActionDistribution {
  std::vector<int> support;      // distinct action indices
  std::vector<double> weights;   // nonnegative, sum to 1 (1e-9 tolerance)

  void validate() const {
    if (support.size() != weights.size())
      throw std::invalid_argument("ActionDistribution: size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (weights[i] < -1e-12)
        throw std::invalid_argument("ActionDistribution: negative weight");
      for (std::size_t j = i + 1; j < support.size(); ++j)
        if (support[i] == support[j])
          throw std::invalid_argument("ActionDistribution: duplicate support entry");
      total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("ActionDistribution: weights do not sum to 1");
  }

  double mass_sum() const {
    double total = 0.0;
    for (double w : weights) total += w;
    return total;
  }

  // Adds mass to an action, merging with an existing atom.
  void add_mass(int action, double mass) {
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (support[i] == action) {
        weights[i] += mass;
        return;
      }
    }
    support.push_back(action);
    weights.push_back(mass);
  }

  int sample(Rng& rng) const {
    return support[rng.categorical(weights)];
  }

  static ActionDistribution point_mass(int action) { return {{action}, {1.0}}; }

  static ActionDistribution uniform(std::span<const int> actions) {
    ActionDistribution q;
    q.support.assign(actions.begin(), actions.end());
    q.weights.assign(actions.size(), 1.0 / static_cast<double>(actions.size()));
    return q;
  }
};

// p = epsilon * base + (1 - epsilon) * point mass.
inline ActionDistribution mix_with_point_mass(const ActionDistribution& base,
                                              double epsilon, int action) {
  ActionDistribution p;
  p.support = base.support;
  p.weights.resize(base.weights.size());
  for (std::size_t i = 0; i < base.weights.size(); ++i)
    p.weights[i] = epsilon * base.weights[i];
  p.add_mass(action, 1.0 - epsilon);
  return p;
}

}  // namespace banditlab
