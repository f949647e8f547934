#include "banditlab/pe_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "banditlab/parallel.hpp"

namespace banditlab::pe {

namespace {

struct Pinv {
  Mat inv;   // A^+
  Mat proj;  // A A^+
};

Pinv make_pinv(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  const Vec& vals = es.eigenvalues();
  const Mat& vecs = es.eigenvectors();
  const double top = std::max(vals.cwiseAbs().maxCoeff(), 1e-300);
  const double tol = top * 1e-12;
  Vec inv_vals = Vec::Zero(vals.size());
  Vec mask = Vec::Zero(vals.size());
  for (int i = 0; i < vals.size(); ++i) {
    if (vals[i] > tol) {
      inv_vals[i] = 1.0 / vals[i];
      mask[i] = 1.0;
    }
  }
  Pinv out;
  out.inv = vecs * inv_vals.asDiagonal() * vecs.transpose();
  out.proj = vecs * mask.asDiagonal() * vecs.transpose();
  return out;
}

double quadform_checked(const Pinv& p, const Vec& y) {
  const double y2 = y.squaredNorm();
  if ((y - p.proj * y).squaredNorm() > 1e-9 * std::max(1.0, y2)) return kInfValue;
  return y.dot(p.inv * y);
}

Mat weighted_gram(const std::vector<Vec>& actions, const std::vector<double>& w) {
  const int d = static_cast<int>(actions[0].size());
  Mat a = Mat::Zero(d, d);
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (w[i] != 0.0) a.noalias() += w[i] * actions[i] * actions[i].transpose();
  return a;
}

Vec truncate(const Vec& x, int d) { return x.head(d); }

std::vector<Vec> truncate_all(const std::vector<Vec>& xs, int d) {
  std::vector<Vec> out;
  out.reserve(xs.size());
  for (const Vec& x : xs) out.push_back(x.head(d));
  return out;
}

// Unordered pairwise differences of the survivors' truncated embeddings.
std::vector<Vec> survivor_directions(const std::vector<Vec>& targets,
                                     const std::vector<int>& survivors, int d) {
  std::vector<Vec> dirs;
  dirs.reserve(survivors.size() * (survivors.size() - 1) / 2);
  for (std::size_t i = 0; i < survivors.size(); ++i)
    for (std::size_t j = i + 1; j < survivors.size(); ++j)
      dirs.push_back(truncate(targets[survivors[i]], d) -
                     truncate(targets[survivors[j]], d));
  return dirs;
}

}  // namespace

std::pair<int, double> max_quadform_serial(const std::vector<Vec>& directions,
                                           const Mat& ainv) {
  return par::argmax_serial(static_cast<int>(directions.size()), [&](int i) {
    return directions[i].dot(ainv * directions[i]);
  });
}

std::pair<int, double> max_quadform_parallel(const std::vector<Vec>& directions,
                                             const Mat& ainv) {
  return par::argmax_parallel(static_cast<int>(directions.size()), [&](int i) {
    return directions[i].dot(ainv * directions[i]);
  });
}

double design_value(const std::vector<Vec>& actions, const std::vector<double>& weights,
                    const std::vector<Vec>& directions) {
  if (directions.empty()) return 0.0;
  const Pinv p = make_pinv(weighted_gram(actions, weights));
  double worst = 0.0;
  for (const Vec& y : directions) worst = std::max(worst, quadform_checked(p, y));
  return worst;
}

DesignResult fw_optimal_design(const DesignProblem& problem) {
  const int K = static_cast<int>(problem.actions.size());
  if (K == 0) throw std::invalid_argument("fw_optimal_design: no actions");
  DesignResult out;
  out.lambda.assign(K, 1.0 / K);
  if (problem.directions.empty()) {
    out.value = 0.0;
    return out;
  }

  // Directions outside span(actions) make the value infinite outright.
  {
    const int d = static_cast<int>(problem.actions[0].size());
    Mat x(d, K);
    for (int i = 0; i < K; ++i) x.col(i) = problem.actions[i];
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(x);
    for (const Vec& y : problem.directions) {
      const Vec resid = y - x * cod.solve(y);
      if (resid.squaredNorm() > 1e-9 * std::max(1.0, y.squaredNorm())) {
        out.value = kInfValue;
        return out;
      }
    }
  }

  constexpr double kFloor = 1e-3;
  // Constant-step Frank-Wolfe zigzags, so convergence is judged on the best
  // iterate over a probing window rather than consecutive values.
  constexpr int kWindow = 10;
  std::vector<double> mixed(K);
  std::vector<double> best_lambda = out.lambda;
  double best_val = kInfValue;
  double window_best = kInfValue;
  for (int k = 1; k <= problem.max_iter; ++k) {
    out.iterations = k;
    for (int i = 0; i < K; ++i)
      mixed[i] = (1.0 - kFloor) * out.lambda[i] + kFloor / K;
    const Pinv p = make_pinv(weighted_gram(problem.actions, mixed));
    auto [yi, val] = par::enabled() && static_cast<int>(problem.directions.size()) >= 64
                         ? max_quadform_parallel(problem.directions, p.inv)
                         : max_quadform_serial(problem.directions, p.inv);
    if (val < best_val) {
      best_val = val;
      best_lambda = out.lambda;
    }
    if (k % kWindow == 0) {
      if (window_best < kInfValue &&
          window_best - best_val < problem.tolerance * best_val)
        break;  // relative improvement of the design value stalled
      window_best = best_val;
    }
    const Vec w = p.inv * problem.directions[yi];
    auto [xi, unused] = par::argmax_serial(K, [&](int i) {
      const double t = problem.actions[i].dot(w);
      return t * t;
    });
    (void)unused;
    const double step = 2.0 / (k + 2.0);
    for (int i = 0; i < K; ++i) out.lambda[i] *= 1.0 - step;
    out.lambda[xi] += step;
  }
  out.lambda = std::move(best_lambda);
  out.value = design_value(problem.actions, out.lambda, problem.directions);
  return out;
}

std::optional<int> opt_dim(double budget, int d_cap,
                           const std::function<double(int)>& g,
                           bool assume_monotone) {
  if (d_cap < 1) return std::nullopt;
  std::map<int, double> memo;
  auto eval = [&](int d) {
    auto it = memo.find(d);
    if (it != memo.end()) return it->second;
    const double v = g(d);
    memo.emplace(d, v);
    return v;
  };
  if (assume_monotone) {
    // Binary search for the feasibility boundary (fast mode; assumes g
    // nondecreasing in d, which the elimination objective need not be).
    if (eval(1) > budget) return std::nullopt;
    int lo = 1, hi = d_cap;
    while (lo < hi) {
      const int mid = lo + (hi - lo + 1) / 2;
      if (eval(mid) <= budget) lo = mid;
      else hi = mid - 1;
    }
    return lo;
  }
  for (int d = d_cap; d >= 1; --d)
    if (eval(d) <= budget) return d;
  return std::nullopt;
}

std::vector<std::int64_t> round_design(const std::vector<double>& lambda,
                                       std::int64_t N, int d, double zeta,
                                       const std::vector<Vec>& actions,
                                       const std::vector<Vec>& directions) {
  if (static_cast<double>(N) < rounding_budget(d, zeta))
    throw std::invalid_argument("round_design: N below the rounding budget");
  const int K = static_cast<int>(lambda.size());
  std::vector<int> support;
  double mass = 0.0;
  for (int i = 0; i < K; ++i)
    if (lambda[i] > 1e-9) {
      support.push_back(i);
      mass += lambda[i];
    }
  if (support.empty()) throw std::invalid_argument("round_design: empty design");

  // Pukelsheim efficient apportionment on the support.
  const int l = static_cast<int>(support.size());
  std::vector<std::int64_t> counts(K, 0);
  std::int64_t total = 0;
  for (int j : support) {
    const double w = lambda[j] / mass;
    counts[j] = static_cast<std::int64_t>(std::ceil((static_cast<double>(N) - 0.5 * l) * w));
    if (counts[j] < 0) counts[j] = 0;
    total += counts[j];
  }
  while (total > N) {
    int pick = -1;
    double best = -1.0;
    for (int j : support) {
      if (counts[j] < 1) continue;
      const double score = (static_cast<double>(counts[j]) - 1.0) / (lambda[j] / mass);
      if (score > best) {
        best = score;
        pick = j;
      }
    }
    --counts[pick];
    --total;
  }
  while (total < N) {
    int pick = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int j : support) {
      const double score = static_cast<double>(counts[j]) / (lambda[j] / mass);
      if (score < best) {
        best = score;
        pick = j;
      }
    }
    ++counts[pick];
    ++total;
  }

  if (directions.empty()) return counts;

  // Certificate with greedy repair: move pulls until the (1+zeta) factor holds.
  const double cont = design_value(actions, lambda, directions);
  const double target = (1.0 + zeta) * cont / static_cast<double>(N) + 1e-12;
  for (int repair = 0; repair <= 64; ++repair) {
    std::vector<double> w(K);
    for (int i = 0; i < K; ++i) w[i] = static_cast<double>(counts[i]);
    const Pinv p = make_pinv(weighted_gram(actions, w));
    double worst = 0.0;
    int worst_dir = 0;
    for (std::size_t yi = 0; yi < directions.size(); ++yi) {
      const double v = quadform_checked(p, directions[yi]);
      if (v > worst) {
        worst = v;
        worst_dir = static_cast<int>(yi);
      }
    }
    if (worst <= target) return counts;
    if (repair == 64)
      throw std::runtime_error("round_design: certificate repair failed");
    const Vec u = p.inv * directions[worst_dir];
    // Add where it most reduces the worst form, remove whereit least hurts.
    int add = -1;
    double add_score = -1.0;
    for (int i = 0; i < K; ++i) {
      const double t = actions[i].dot(u);
      const double s = t * t / (1.0 + actions[i].dot(p.inv * actions[i]));
      if (s > add_score) {
        add_score = s;
        add = i;
      }
    }
    int sub = -1;
    double sub_score = std::numeric_limits<double>::infinity();
    for (int i = 0; i < K; ++i) {
      if (counts[i] < 1 || i == add) continue;
      const double leverage = actions[i].dot(p.inv * actions[i]);
      if (leverage >= 1.0 - 1e-9) continue;  // removal would break invertibility
      const double t = actions[i].dot(u);
      const double s = t * t / (1.0 - leverage);
      if (s < sub_score) {
        sub_score = s;
        sub = i;
      }
    }
    if (sub < 0) throw std::runtime_error("round_design: repair stuck");
    ++counts[add];
    --counts[sub];
  }
  return counts;
}

namespace {

struct RoundFit {
  Vec theta;        // least squares estimate in R^{d_k}
  Mat gram_pinv;    // A_k^+
  int dim = 0;
};

// Pulls the rounded allocation and fits least squares in R^d.
RoundFit sample_and_fit(const Instance& inst, const std::vector<std::int64_t>& counts,
                        int d, Rng& rng) {
  RoundFit fit;
  fit.dim = d;
  Mat gram = Mat::Zero(d, d);
  Vec moment = Vec::Zero(d);
  for (int a = 0; a < inst.num_actions(); ++a) {
    if (counts[a] == 0) continue;
    const Vec psi = truncate(inst.action_features[a], d);
    gram.noalias() += static_cast<double>(counts[a]) * psi * psi.transpose();
    moment.noalias() += sample_reward_sum(inst, a, counts[a], rng) * psi;
  }
  const Pinv p = make_pinv(gram);
  fit.theta = p.inv * moment;
  fit.gram_pinv = p.inv;
  return fit;
}

// Survivor with the best last-round estimate (lowest index tie-break).
int best_estimate(const Instance& inst, const std::vector<int>& survivors,
                  const RoundFit* fit) {
  if (survivors.empty()) throw std::runtime_error("gems: no survivors");
  if (fit == nullptr || fit->dim == 0) return survivors.front();
  int best = survivors.front();
  double best_val = -std::numeric_limits<double>::infinity();
  for (int z : survivors) {
    const double v = fit->theta.dot(truncate(inst.target_features[z], fit->dim));
    if (v > best_val) {
      best_val = v;
      best = z;
    }
  }
  return best;
}

}  // namespace

ElimState gems_fc_run(const Instance& inst, int n, double B, double delta,
                      GemsMode mode, Rng& rng, SampleBudget& budget) {
  ElimState state;
  state.survivors.resize(inst.num_targets());
  std::iota(state.survivors.begin(), state.survivors.end(), 0);
  const int D = inst.dim();
  const double factor = mode == GemsMode::Robust ? 8.0 : 2.0;

  for (int k = 1; k <= n; ++k) {
    if (state.survivors.size() <= 1) break;
    const double delta_k = delta / (static_cast<double>(k) * k);
    const double pow4k = std::pow(2.0, 2.0 * k);

    std::map<int, DesignResult> designs;
    auto g = [&](int d) {
      DesignProblem prob;
      prob.actions = truncate_all(inst.action_features, d);
      prob.directions = survivor_directions(inst.target_features, state.survivors, d);
      auto res = fw_optimal_design(prob);
      const double val = std::max(pow4k * res.value, rounding_budget(d, kZeta));
      designs.emplace(d, std::move(res));
      return val;
    };
    const auto dk = opt_dim(B, D, g);
    if (!dk) {
      state.dim_infeasible = true;
      break;
    }
    state.chosen_dims.push_back(*dk);
    const DesignResult& des = designs.at(*dk);
    const double g_dk = std::max(pow4k * des.value, rounding_budget(*dk, kZeta));
    const double m = static_cast<double>(state.survivors.size());
    const auto Nk = static_cast<std::int64_t>(
        std::ceil(g_dk * factor * (1.0 + kZeta) * std::log(m * m / delta_k)));
    budget.spend(Nk);

    const auto actions_d = truncate_all(inst.action_features, *dk);
    const auto dirs = survivor_directions(inst.target_features, state.survivors, *dk);
    const auto counts = round_design(des.lambda, Nk, *dk, kZeta, actions_d, dirs);
    const RoundFit fit = sample_and_fit(inst, counts, *dk, rng);
    state.samples += Nk;

    // Eliminate: z goes when some z' beats it by the width (exact) or by the
    // fixed 2^-k threshold (robust).
    const double log_term = std::sqrt(2.0 * std::log(m * m / delta_k));
    std::vector<double> est(state.survivors.size());
    std::vector<Vec> psi(state.survivors.size());
    for (std::size_t i = 0; i < state.survivors.size(); ++i) {
      psi[i] = truncate(inst.target_features[state.survivors[i]], *dk);
      est[i] = fit.theta.dot(psi[i]);
    }
    std::vector<int> next;
    for (std::size_t i = 0; i < state.survivors.size(); ++i) {
      bool eliminated = false;
      for (std::size_t j = 0; j < state.survivors.size() && !eliminated; ++j) {
        if (i == j) continue;
        const double gap_est = est[j] - est[i];
        double width;
        if (mode == GemsMode::Robust) {
          width = std::pow(2.0, -k);
        } else {
          const Vec y = psi[j] - psi[i];
          width = std::sqrt(std::max(y.dot(fit.gram_pinv * y), 0.0)) * log_term;
        }
        if (gap_est >= width) eliminated = true;
      }
      if (!eliminated) next.push_back(state.survivors[i]);
    }
    if (next.empty()) next.push_back(best_estimate(inst, state.survivors, &fit));
    state.survivors = std::move(next);
    state.rounds_done = k;
  }
  return state;
}

int gems_fb_run(const Instance& inst, double T, int n, double B, Rng& rng) {
  if (n < 1) throw std::invalid_argument("gems_fb_run: n < 1");
  if (T / n < 2.0) throw std::invalid_argument("gems_fb_run: T/n < 2");
  const auto T_round = static_cast<std::int64_t>(std::floor(T / n));
  const int D = inst.dim();
  const auto D_tilde = opt_dim(static_cast<double>(T_round), D,
                               [&](int d) { return rounding_budget(d, kZeta); }, true);
  if (!D_tilde) throw std::invalid_argument("gems_fb_run: rounding infeasible at any d");

  std::vector<int> survivors(inst.num_targets());
  std::iota(survivors.begin(), survivors.end(), 0);
  RoundFit last_fit;

  for (int k = 1; k <= n; ++k) {
    if (survivors.size() <= 1) break;
    const double pow4k = std::pow(2.0, 2.0 * k);
    std::map<int, DesignResult> designs;
    auto g = [&](int d) {
      DesignProblem prob;
      prob.actions = truncate_all(inst.action_features, d);
      prob.directions = survivor_directions(inst.target_features, survivors, d);
      auto res = fw_optimal_design(prob);
      const double val = pow4k * res.value;
      designs.emplace(d, std::move(res));
      return val;
    };
    auto dk = opt_dim(B, *D_tilde, g);
    if (!dk) {
      // No dimension fits the selection budget; fall back to the cheapest one
      // and keep spending the fixed per-round allocation.
      int best_d = 1;
      double best_val = std::numeric_limits<double>::infinity();
      for (int d = 1; d <= *D_tilde; ++d) {
        const double v = designs.count(d) ? pow4k * designs[d].value : g(d);
        if (v < best_val) {
          best_val = v;
          best_d = d;
        }
      }
      dk = best_d;
    }
    const DesignResult& des = designs.at(*dk);
    const auto actions_d = truncate_all(inst.action_features, *dk);
    const auto dirs = survivor_directions(inst.target_features, survivors, *dk);
    const auto counts = round_design(des.lambda, T_round, *dk, kZeta, actions_d, dirs);
    last_fit = sample_and_fit(inst, counts, *dk, rng);

    std::vector<double> est(survivors.size());
    for (std::size_t i = 0; i < survivors.size(); ++i)
      est[i] = last_fit.theta.dot(truncate(inst.target_features[survivors[i]], *dk));
    const double threshold = std::pow(2.0, -k);
    std::vector<int> next;
    for (std::size_t i = 0; i < survivors.size(); ++i) {
      bool eliminated = false;
      for (std::size_t j = 0; j < survivors.size() && !eliminated; ++j)
        if (j != i && est[j] - est[i] >= threshold) eliminated = true;
      if (!eliminated) next.push_back(survivors[i]);
    }
    if (next.empty()) next.push_back(best_estimate(inst, survivors, &last_fit));
    survivors = std::move(next);
  }
  return best_estimate(inst, survivors, last_fit.dim ? &last_fit : nullptr);
}

double lambert_base2(double T) {
  if (T < 2.0) return 0.0;
  double lo = 0.0, hi = 64.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid * std::pow(2.0, mid) < T) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

RecommendationTrace adaptive_fc_run(const Instance& inst, double delta, GemsMode mode,
                                    Rng& rng, std::int64_t sample_cap,
                                    double epsilon) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("adaptive_fc_run: delta outside (0,1)");
  if (mode == GemsMode::Robust && !(epsilon > 0.0))
    throw std::invalid_argument("adaptive_fc_run: robust mode needs epsilon > 0");
  RecommendationTrace trace;
  SampleBudget budget;
  budget.cap = sample_cap;
  int rec = rng.index(inst.num_targets());
  trace.events.emplace_back(0, rec);
  if (inst.num_targets() <= 1) return trace;
  auto record = [&](int z) {
    if (z != rec) {
      rec = z;
      trace.events.emplace_back(budget.used, rec);
    }
  };

  try {
    for (int l = 1; l <= 60; ++l) {
      const double delta_l =
          mode == GemsMode::Robust ? delta / (4.0 * l * l * l) : delta / (2.0 * l * l * l);
      std::vector<int> candidates;
      for (int i = 1; i <= l; ++i) {
        const int n_i = 1 << i;
        const double B_i = std::pow(2.0, l - i);
        ElimState state = gems_fc_run(inst, n_i, B_i, delta_l, mode, rng, budget);
        if (mode == GemsMode::Exact) {
          if (state.survivors.size() == 1) {
            record(state.survivors.front());
            break;  // first singleton wins this outer iteration
          }
        } else {
          const int z = state.survivors.front();
          if (std::find(candidates.begin(), candidates.end(), z) == candidates.end())
            candidates.push_back(z);
        }
      }
      if (mode == GemsMode::Robust && !candidates.empty()) {
        const auto pulls = static_cast<std::int64_t>(
            std::ceil(8.0 * std::log(2.0 / delta_l) / (epsilon * epsilon)));
        budget.spend(pulls * static_cast<std::int64_t>(candidates.size()));
        int best = candidates.front();
        double best_mean = -std::numeric_limits<double>::infinity();
        for (int z : candidates) {
          const double mean =
              sample_reward_sum(inst, z, pulls, rng) / static_cast<double>(pulls);
          if (mean > best_mean) {
            best_mean = mean;
            best = z;
          }
        }
        record(best);
      }
    }
  } catch (const BudgetExhausted&) {
  }
  trace.total_samples = budget.used;
  return trace;
}

int adaptive_fb_run(const Instance& inst, std::int64_t two_T, Rng& rng) {
  if (two_T < 8) throw std::invalid_argument("adaptive_fb_run: budget too small");
  const double T = static_cast<double>(two_T) / 2.0;
  const int p = std::max(1, static_cast<int>(std::floor(lambert_base2(T))));
  const double T1 = T / p;
  std::vector<int> pre_selection;
  for (int i = 1; i <= p; ++i) {
    const double B_i = std::pow(2.0, i);
    const int q_i = static_cast<int>(std::floor(lambert_base2(T1 / B_i)));
    if (q_i < 1) continue;
    const double T2 = T1 / q_i;
    for (int j = 1; j <= q_i; ++j) {
      const int n_j = 1 << j;
      if (T2 / n_j < 2.0) continue;
      int z;
      try {
        z = gems_fb_run(inst, T2, n_j, B_i, rng);
      } catch (const std::exception&) {
        continue;  // rounding infeasible for this configuration
      }
      if (std::find(pre_selection.begin(), pre_selection.end(), z) == pre_selection.end())
        pre_selection.push_back(z);
    }
  }
  if (pre_selection.empty()) return 0;
  const auto pulls = static_cast<std::int64_t>(
      std::floor(T / static_cast<double>(pre_selection.size())));
  if (pulls <= 0) return pre_selection.front();
  int best = pre_selection.front();
  double best_mean = -std::numeric_limits<double>::infinity();
  for (int z : pre_selection) {
    const double mean = sample_reward_sum(inst, z, pulls, rng) / static_cast<double>(pulls);
    if (mean > best_mean) {
      best_mean = mean;
      best = z;
    }
  }
  return best;
}

RecommendationTrace rage_run(const Instance& inst, double delta, Rng& rng,
                             std::int64_t sample_cap) {
  RecommendationTrace trace;
  SampleBudget budget;
  budget.cap = sample_cap;
  const int D = inst.dim();
  std::vector<int> survivors(inst.num_targets());
  std::iota(survivors.begin(), survivors.end(), 0);
  int rec = rng.index(inst.num_targets());
  trace.events.emplace_back(0, rec);
  auto record = [&](int z) {
    if (z != rec) {
      rec = z;
      trace.events.emplace_back(budget.used, rec);
    }
  };

  try {
    for (int k = 1; survivors.size() > 1 && k < 64; ++k) {
      const double delta_k = delta / (static_cast<double>(k) * k);
      DesignProblem prob;
      prob.actions = inst.action_features;
      prob.directions = survivor_directions(inst.target_features, survivors, D);
      const DesignResult des = fw_optimal_design(prob);
      const double m = static_cast<double>(survivors.size());
      const double g = std::max(std::pow(2.0, 2.0 * k) * des.value,
                                rounding_budget(D, kZeta));
      const auto Nk = static_cast<std::int64_t>(
          std::ceil(g * 2.0 * (1.0 + kZeta) * std::log(m * m / delta_k)));
      budget.spend(Nk);
      const auto counts =
          round_design(des.lambda, Nk, D, kZeta, prob.actions, prob.directions);
      const RoundFit fit = sample_and_fit(inst, counts, D, rng);
      const double log_term = std::sqrt(2.0 * std::log(m * m / delta_k));
      std::vector<double> est(survivors.size());
      std::vector<Vec> psi(survivors.size());
      for (std::size_t i = 0; i < survivors.size(); ++i) {
        psi[i] = inst.target_features[survivors[i]];
        est[i] = fit.theta.dot(psi[i]);
      }
      std::vector<int> next;
      for (std::size_t i = 0; i < survivors.size(); ++i) {
        bool eliminated = false;
        for (std::size_t j = 0; j < survivors.size() && !eliminated; ++j) {
          if (i == j) continue;
          const Vec y = psi[j] - psi[i];
          const double width =
              std::sqrt(std::max(y.dot(fit.gram_pinv * y), 0.0)) * log_term;
          if (est[j] - est[i] >= width) eliminated = true;
        }
        if (!eliminated) next.push_back(survivors[i]);
      }
      if (next.empty()) next.push_back(best_estimate(inst, survivors, &fit));
      survivors = std::move(next);
      record(best_estimate(inst, survivors, &fit));
    }
  } catch (const BudgetExhausted&) {
  }
  trace.total_samples = budget.used;
  return trace;
}

double rho_star(const Instance& inst, int d, double epsilon) {
  if (d < 1 || d > inst.dim()) throw std::invalid_argument("rho_star: bad dimension");
  const int zstar = inst.best_target();
  const double mu_star = inst.mean_of_target(zstar);
  if (epsilon <= 0.0) {
    int ties = 0;
    for (int z = 0; z < inst.num_targets(); ++z)
      if (std::abs(inst.mean_of_target(z) - mu_star) < 1e-12) ++ties;
    if (ties > 1)
      throw std::invalid_argument("rho_star: best target not unique at epsilon = 0");
  }
  DesignProblem prob;
  prob.actions = truncate_all(inst.action_features, d);
  for (int z = 0; z < inst.num_targets(); ++z) {
    if (z == zstar) continue;
    const double gap = std::max(mu_star - inst.mean_of_target(z), epsilon);
    prob.directions.push_back(
        (truncate(inst.target_features[zstar], d) - truncate(inst.target_features[z], d)) /
        gap);
  }
  return fw_optimal_design(prob).value;
}

double misspec_gamma_tilde(const Instance& inst, int d) {
  std::vector<Vec> pts = inst.action_features;
  pts.insert(pts.end(), inst.target_features.begin(), inst.target_features.end());
  const int m = static_cast<int>(pts.size());
  std::vector<double> h(m);
  std::vector<Vec> psi(m);
  for (int i = 0; i < m; ++i) {
    h[i] = inst.mean_reward(pts[i]);
    psi[i] = truncate(pts[i], d);
  }
  // Lawson's iteratively reweighted least squares for the Chebyshev fit.
  std::vector<double> w(m, 1.0 / m);
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 500; ++it) {
    Mat gram = Mat::Zero(d, d);
    Vec moment = Vec::Zero(d);
    for (int i = 0; i < m; ++i) {
      gram.noalias() += w[i] * psi[i] * psi[i].transpose();
      moment.noalias() += w[i] * h[i] * psi[i];
    }
    const Vec theta = make_pinv(gram).inv * moment;
    double max_e = 0.0, mass = 0.0;
    std::vector<double> e(m);
    for (int i = 0; i < m; ++i) {
      e[i] = std::abs(h[i] - theta.dot(psi[i]));
      max_e = std::max(max_e, e[i]);
    }
    best = std::min(best, max_e);
    if (max_e < 1e-12) return 0.0;
    for (int i = 0; i < m; ++i) {
      w[i] *= e[i];
      mass += w[i];
    }
    if (mass < 1e-300) break;
    for (int i = 0; i < m; ++i) w[i] /= mass;
  }
  return best;
}

double misspec_gamma(const Instance& inst, int d) {
  const double gt = misspec_gamma_tilde(inst, d);
  if (gt == 0.0) return 0.0;
  const int zstar = inst.best_target();
  const double mu_star = inst.mean_of_target(zstar);
  int feasible_n = 0;
  for (int k = 1; k <= 60; ++k) {
    std::vector<int> sk;
    const double cut = 4.0 * std::pow(2.0, -k);
    for (int z = 0; z < inst.num_targets(); ++z)
      if (mu_star - inst.mean_of_target(z) < cut) sk.push_back(z);
    DesignProblem prob;
    prob.actions = truncate_all(inst.action_features, d);
    prob.directions = survivor_directions(inst.target_features, sk, d);
    const double iota = prob.directions.empty() ? 0.0 : fw_optimal_design(prob).value;
    const double lhs = (2.0 + std::sqrt((1.0 + kZeta) * iota)) * gt;
    if (lhs <= std::pow(2.0, -k) / 2.0) feasible_n = k;
    else break;
  }
  if (feasible_n == 0) return kInfValue;
  return 2.0 * std::pow(2.0, -feasible_n);
}

std::optional<int> misspec_dstar(const Instance& inst, double eps) {
  const int D = inst.dim();
  std::vector<double> gamma(D + 1, kInfValue);
  for (int d = 1; d <= D; ++d) gamma[d] = misspec_gamma(inst, d);
  for (int d = 1; d <= D; ++d) {
    bool ok = true;
    for (int d2 = d; d2 <= D; ++d2) ok = ok && gamma[d2] <= eps;
    if (ok) return d;
  }
  return std::nullopt;
}

}  // namespace banditlab::pe
