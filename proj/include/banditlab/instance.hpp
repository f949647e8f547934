#pragma once
// Problem instances: action/target embeddings, reward parameter, noise law.
// Immutable after construction; safe to read from many threads.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "banditlab/rng.hpp"

namespace banditlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class NoiseKind { Gaussian, Bernoulli };

struct Instance {
  std::vector<Vec> action_features;       // K vectors in R^D
  std::vector<Vec> target_features;       // M vectors; defaults to actions
  Vec theta_star;                         // coordinates past intrinsic_dim are 0
  int intrinsic_dim = 0;                  // d* <= D
  NoiseKind noise = NoiseKind::Gaussian;
  double sigma = 1.0;
  std::optional<std::pair<double, double>> reward_clip;
  bool unit_norm = false;                 // enforce ||feature|| <= 1 at construction
  bool require_span = false;              // enforce span(actions) = R^D

  int dim() const { return static_cast<int>(theta_star.size()); }
  int num_actions() const { return static_cast<int>(action_features.size()); }
  int num_targets() const { return static_cast<int>(target_features.size()); }

  double mean_reward(const Vec& x) const;
  double mean_of_action(int a) const { return mean_reward(action_features.at(a)); }
  double mean_of_target(int z) const { return mean_reward(target_features.at(z)); }

  int best_action() const;   // argmax of mean over actions, lowest index
  int best_target() const;   // argmax of mean over targets, lowest index

  // Checks the declared invariants; throws std::invalid_argument on breach.
  void validate() const;
};

// Builds an instance (target set defaults to the action set) and validates it.
Instance make_instance(std::vector<Vec> actions, Vec theta_star, int intrinsic_dim,
                       NoiseKind noise, double sigma,
                       std::vector<Vec> targets = {}, bool unit_norm = false,
                       bool require_span = false);

// One stochastic reward for the given action; deterministic given rng state.
double sample_reward(const Instance& inst, int action_index, Rng& rng);

// Sum of `count` iid rewards for one action. Gaussian mode uses a single
// normal draw for the sum; Bernoulli mode loops.
double sample_reward_sum(const Instance& inst, int action_index, std::int64_t count,
                         Rng& rng);

// Plain-text instance file: "D K M", K action rows, M target rows, theta row,
// then "noise=<gaussian|bernoulli> sigma=<f> dstar=<n>".
void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);

// Context + per-context action embedding tables, for contextual policies.
struct ContextualInstance {
  std::vector<Mat> context_embeddings;  // one d x K table per context (columns = actions)
  std::vector<Vec> gstar;               // g*(x) per context
  std::int64_t horizon = 0;
  bool realizable = true;
  double kappa = 0.0;                   // misspecification bound when !realizable
  NoiseKind noise = NoiseKind::Gaussian;
  double sigma = 1.0;

  int num_contexts() const { return static_cast<int>(context_embeddings.size()); }
  int dim() const { return context_embeddings.empty() ? 0 : static_cast<int>(context_embeddings[0].rows()); }
  int num_actions(int ctx) const { return static_cast<int>(context_embeddings.at(ctx).cols()); }

  double mean_reward(int ctx, int action) const {
    return gstar.at(ctx).dot(context_embeddings.at(ctx).col(action));
  }
  double sample_loss(int ctx, int action, Rng& rng) const;    // loss = 1 - reward
  double sample_reward(int ctx, int action, Rng& rng) const;
};

}  // namespace banditlab
