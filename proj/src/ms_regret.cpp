#include "banditlab/ms_regret.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "banditlab/cb_policies.hpp"

namespace banditlab::ms {

namespace {

// Flattened per-run view of the mixture arms: sampling tables and cached
// means, so the per-pull cost does not grow with the component lists.
struct MixtureRuntime {
  std::vector<std::vector<double>> probs;
  std::vector<std::vector<int>> handles;
  std::vector<double> mean;

  MixtureRuntime(const std::vector<MixtureArm>& mixtures, const Instance& inst) {
    const std::size_t m = mixtures.size();
    probs.resize(m);
    handles.resize(m);
    mean.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0, mass = 0.0;
      probs[j].reserve(mixtures[j].components.size());
      handles[j].reserve(mixtures[j].components.size());
      for (const auto& [h, p] : mixtures[j].components) {
        probs[j].push_back(p);
        handles[j].push_back(h);
        // Levels strictly decrease, so lower-index means are already final.
        acc += p * (is_mixture(h) ? mean[mixture_index(h)] : inst.mean_of_action(h));
        mass += p;
      }
      mean[j] = mass > 0.0 ? acc / mass : 0.0;
    }
  }

  int sample(int handle, Rng& rng) const {
    while (is_mixture(handle)) {
      const int j = mixture_index(handle);
      handle = handles[j][rng.categorical(probs[j])];
    }
    return handle;
  }

  double mean_of(const Instance& inst, int handle) const {
    return is_mixture(handle) ? mean[mixture_index(handle)] : inst.mean_of_action(handle);
  }
};

// Heap entries compare by (value, -position): ties to the lowest position.
struct HeapLess {
  bool operator()(const std::tuple<double, int, std::uint32_t>& a,
                  const std::tuple<double, int, std::uint32_t>& b) const {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) > std::get<1>(b);
  }
};

// Random subset of size k from [0, n) without replacement (partial
// Fisher-Yates); returned sorted for deterministic downstream order.
std::vector<int> sample_subset(int n, std::int64_t k, Rng& rng) {
  if (k >= n) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> out;
  out.reserve(k);
  for (std::int64_t i = 0; i < k; ++i) {
    const std::int64_t j = i + static_cast<std::int64_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int mixture_sample(const std::vector<MixtureArm>& mixtures, int handle, Rng& rng) {
  int depth = 0;
  while (is_mixture(handle)) {
    const MixtureArm& m = mixtures.at(mixture_index(handle));
    if (++depth > static_cast<int>(mixtures.size()) + 1)
      throw std::runtime_error("mixture_sample: cycle detected");
    std::vector<double> probs(m.components.size());
    for (std::size_t i = 0; i < m.components.size(); ++i) probs[i] = m.components[i].second;
    handle = m.components[rng.categorical(probs)].first;
  }
  return handle;
}

double mixture_mean(const std::vector<MixtureArm>& mixtures, const Instance& inst,
                    int handle) {
  if (!is_mixture(handle)) return inst.mean_of_action(handle);
  const MixtureArm& m = mixtures.at(mixture_index(handle));
  double total = 0.0, mass = 0.0;
  for (const auto& [h, p] : m.components) {
    total += p * mixture_mean(mixtures, inst, h);
    mass += p;
  }
  return mass > 0.0 ? total / mass : 0.0;
}

void validate_mixtures(const std::vector<MixtureArm>& mixtures) {
  for (std::size_t j = 0; j < mixtures.size(); ++j) {
    double mass = 0.0;
    for (const auto& [h, p] : mixtures[j].components) {
      if (p < 0.0) throw std::invalid_argument("MixtureArm: negative probability");
      if (is_mixture(h)) {
        const auto& child = mixtures.at(mixture_index(h));
        if (child.level >= mixtures[j].level)
          throw std::invalid_argument("MixtureArm: levels must strictly decrease");
      }
      mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-9)
      throw std::invalid_argument("MixtureArm: probabilities do not sum to 1");
  }
}

SchedulePlan mosspp_schedule(std::int64_t T, double beta) {
  if (!(beta >= 0.5 && beta < 1.0))
    throw std::invalid_argument("mosspp_schedule: beta outside [1/2, 1)");
  if (T < 2) throw std::invalid_argument("mosspp_schedule: T < 2");
  SchedulePlan plan;
  plan.p = static_cast<int>(std::ceil(beta * std::log2(static_cast<double>(T))));
  for (int i = 1; i <= plan.p; ++i) {
    plan.arm_counts.push_back(std::int64_t{1} << (plan.p + 2 - i));
    const std::int64_t len = plan.p + i < 62 ? (std::int64_t{1} << (plan.p + i)) : T;
    plan.lengths.push_back(std::min(len, T));
  }
  return plan;
}

MossState::MossState(std::int64_t horizon, std::vector<int> handles,
                     std::vector<ArmStats> seeded)
    : horizon_(horizon), handles_(std::move(handles)) {
  if (handles_.empty()) throw std::invalid_argument("MossState: no arms");
  if (horizon_ < static_cast<std::int64_t>(handles_.size()))
    throw std::invalid_argument("MossState: horizon below number of arms");
  stats_ = seeded.empty() ? std::vector<ArmStats>(handles_.size()) : std::move(seeded);
  if (stats_.size() != handles_.size())
    throw std::invalid_argument("MossState: seeded stats size mismatch");
  pulls_.assign(handles_.size(), 0);
  version_.assign(handles_.size(), 0);
  heap_.reserve(handles_.size() + 16);
}

double MossState::index_of(int pos) const {
  const auto& s = stats_[pos];
  const double n = static_cast<double>(handles_.size());
  const double cnt = static_cast<double>(s.count);
  const double logplus =
      std::max(0.0, std::log(static_cast<double>(horizon_) / (n * cnt)));
  return s.mean() + std::sqrt(4.0 / cnt * logplus);
}

double MossState::pull(const Instance& inst, const std::vector<MixtureArm>& mixtures,
                       std::int64_t count, Rng& rng, RegretTrace* trace,
                       double benchmark) {
  const MixtureRuntime mix(mixtures, inst);
  double realized = 0.0;
  const int n = static_cast<int>(handles_.size());
  for (std::int64_t step = 0; step < count; ++step) {
    int pos;
    if (forced_ < n) {
      // One forced pull per handle; a handle with seeded data still gets its
      // forced pull so the run's own counter starts consistently.
      pos = forced_++;
    } else {
      while (true) {
        if (heap_.empty()) throw std::runtime_error("MossState: empty heap");
        std::pop_heap(heap_.begin(), heap_.end(), HeapLess{});
        const auto [val, pos2, ver] = heap_.back();
        heap_.pop_back();
        if (ver == version_[pos2]) {
          pos = pos2;
          break;
        }
      }
    }
    const int handle = handles_[pos];
    const int real = mix.sample(handle, rng);
    const double r = sample_reward(inst, real, rng);
    realized += r;
    stats_[pos].count += 1;
    stats_[pos].sum += r;
    pulls_[pos] += 1;
    ++pulled_;
    ++version_[pos];
    heap_.emplace_back(index_of(pos), pos, version_[pos]);
    std::push_heap(heap_.begin(), heap_.end(), HeapLess{});
    if (trace) trace->step(benchmark, mix.mean_of(inst, handle));
  }
  return realized;
}

RunResult moss_run(const Instance& inst, std::int64_t T, Rng& rng,
                   std::int64_t pull_cap) {
  if (pull_cap < 0) pull_cap = T;
  std::vector<int> handles(inst.num_actions());
  std::iota(handles.begin(), handles.end(), 0);
  if (T < static_cast<std::int64_t>(handles.size()))
    throw std::invalid_argument("moss_run: T below number of arms");
  const double mu_star = inst.mean_of_action(inst.best_action());
  RegretTrace trace(pull_cap);
  MossState state(T, std::move(handles));
  std::vector<MixtureArm> no_mixtures;
  state.pull(inst, no_mixtures, pull_cap, rng, &trace, mu_star);
  return {trace.cumulative(), trace.rounds(), trace.curve()};
}

RunResult mosspp_run(const Instance& inst, std::int64_t T, double beta,
                     MossppVariant variant, Rng& rng, std::int64_t pull_cap) {
  if (pull_cap < 0) pull_cap = T;
  const SchedulePlan plan = mosspp_schedule(T, beta);
  const int n = inst.num_actions();
  const double mu_star = inst.mean_of_action(inst.best_action());
  RegretTrace trace(pull_cap);
  std::vector<MixtureArm> mixtures;
  // Persistent per-handle statistics for the empirical variant (reused across
  // iterations); handles: real arms then mixture arms by level.
  std::vector<ArmStats> global_real(n);
  std::vector<ArmStats> global_mixture;

  std::int64_t t = 0;
  for (int i = 1; i <= plan.p && t < pull_cap; ++i) {
    const std::int64_t Ki = std::min<std::int64_t>(plan.arm_counts[i - 1], n);
    std::vector<int> reals;
    if (variant == MossppVariant::Empirical && i > 1) {
      // Top-K_i real arms by empirical mean, lowest index on ties.
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return global_real[a].mean() > global_real[b].mean();
      });
      reals.assign(order.begin(), order.begin() + Ki);
      std::sort(reals.begin(), reals.end());
    } else {
      reals = sample_subset(n, Ki, rng);
    }
    std::vector<int> handles = reals;
    for (std::size_t j = 0; j < mixtures.size(); ++j)
      handles.push_back(mixture_handle(static_cast<int>(j)));

    const std::int64_t budget = std::min(plan.lengths[i - 1], pull_cap - t);
    if (budget <= 0) break;
    // Tail segment shorter than the arm list: MOSS only gets through part of
    // its forced exploration; truncate the handle set to match.
    if (budget < static_cast<std::int64_t>(handles.size()))
      handles.resize(static_cast<std::size_t>(budget));
    std::vector<ArmStats> seeded;
    if (variant == MossppVariant::Empirical) {
      seeded.reserve(handles.size());
      for (int h : handles)
        seeded.push_back(is_mixture(h) ? global_mixture[mixture_index(h)]
                                       : global_real[h]);
    }
    MossState state(std::max(plan.lengths[i - 1], budget), handles, std::move(seeded));
    state.pull(inst, mixtures, budget, rng, &trace, mu_star);
    t += budget;

    if (variant == MossppVariant::Empirical) {
      const auto& st = state.stats();
      for (std::size_t pos = 0; pos < handles.size(); ++pos) {
        const int h = handles[pos];
        if (is_mixture(h)) global_mixture[mixture_index(h)] = st[pos];
        else global_real[h] = st[pos];
      }
    }

    // Mixture arm from this iteration's empirical sampling frequencies.
    MixtureArm arm;
    arm.level = i;
    const auto counts = state.pull_counts();
    const double total = static_cast<double>(state.pulled());
    for (std::size_t pos = 0; pos < handles.size(); ++pos)
      if (counts[pos] > 0)
        arm.components.emplace_back(handles[pos], counts[pos] / total);
    mixtures.push_back(std::move(arm));
    global_mixture.emplace_back();
  }
  return {trace.cumulative(), trace.rounds(), trace.curve()};
}

RunResult parallel_run(const Instance& inst, std::int64_t T, double mu_star, Rng& rng) {
  if (T < 4) throw std::invalid_argument("parallel_run: T too small");
  const int p = static_cast<int>(std::ceil(std::log(static_cast<double>(T))));
  const auto block = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(T))));
  const int n = inst.num_actions();
  const double bench = inst.mean_of_action(inst.best_action());
  RegretTrace trace(T);
  std::vector<MixtureArm> no_mixtures;

  struct Sub {
    MossState state;
    double realized = 0.0;
    double emp_regret = 0.0;
  };
  std::vector<Sub> subs;
  subs.reserve(p);
  for (int i = 1; i <= p; ++i) {
    const double alpha = static_cast<double>(i) / p;
    auto size = static_cast<std::int64_t>(
        std::ceil(2.0 * std::pow(static_cast<double>(T), alpha) *
                  std::log(std::sqrt(static_cast<double>(T)))));
    size = std::max<std::int64_t>(1, std::min<std::int64_t>({size, n, T}));
    auto arms = sample_subset(n, size, rng);
    subs.push_back(Sub{MossState(T, std::move(arms)), 0.0, 0.0});
  }

  std::int64_t t = 0;
  for (std::int64_t it = 0; it < block && t < T; ++it) {
    int k = 0;
    for (int i = 1; i < p; ++i)
      if (subs[i].emp_regret < subs[k].emp_regret) k = i;
    const std::int64_t len = std::min(block, T - t);
    subs[k].realized += subs[k].state.pull(inst, no_mixtures, len, rng, &trace, bench);
    subs[k].emp_regret =
        static_cast<double>(subs[k].state.pulled()) * mu_star - subs[k].realized;
    t += len;
  }
  return {trace.cumulative(), trace.rounds(), trace.curve()};
}

LinUcb::LinUcb(Mat arms, double width_multiplier, double ridge)
    : arms_(std::move(arms)),
      vinv_(Mat::Identity(arms_.rows(), arms_.rows()) / ridge),
      moment_(Vec::Zero(arms_.rows())),
      theta_(Vec::Zero(arms_.rows())),
      width_(width_multiplier) {
  means_ = Vec::Zero(arms_.cols());
  vars_ = (arms_.transpose() * (vinv_ * arms_)).diagonal();
}

int LinUcb::choose() const {
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < arms_.cols(); ++a) {
    const double s = score(a);
    if (s > best_score) {
      best_score = s;
      best = a;
    }
  }
  return best;
}

void LinUcb::update(int arm, double reward) {
  // Sherman-Morrison on V^-1 plus rank-one refresh of the per-arm variances:
  // a'Vnew^-1 a = a'V^-1 a - (a'u)^2 / (1 + x'u) with u = V^-1 x.
  const Vec x = arms_.col(arm);
  const Vec u = vinv_ * x;
  const double c = 1.0 + x.dot(u);
  const Vec w = arms_.transpose() * u;
  vars_ -= w.cwiseProduct(w) / c;
  vinv_.noalias() -= (u * u.transpose()) / c;
  moment_ += reward * x;
  theta_ = vinv_ * moment_;
  means_ = arms_.transpose() * theta_;
}

double linucb_width_multiplier(std::int64_t T, int K, double delta) {
  const double alpha =
      2.0 * std::sqrt(std::log(2.0 * static_cast<double>(T) * K / delta));
  return alpha + 2.0 * std::log(static_cast<double>(T));
}

RunResult linucb_run(const Instance& inst, std::int64_t T, double delta, Rng& rng,
                     std::vector<int>* actions) {
  const double mu_star = inst.mean_of_action(inst.best_action());
  RegretTrace trace(T);
  Mat arms(inst.dim(), inst.num_actions());
  for (int a = 0; a < inst.num_actions(); ++a) arms.col(a) = inst.action_features[a];
  LinUcb alg(std::move(arms), linucb_width_multiplier(T, inst.num_actions(), delta));
  for (std::int64_t t = 0; t < T; ++t) {
    const int a = alg.choose();
    const double r = sample_reward(inst, a, rng);
    alg.update(a, r);
    if (actions) actions->push_back(a);
    trace.step(mu_star, inst.mean_of_action(a));
  }
  return {trace.cumulative(), trace.rounds(), trace.curve()};
}

RunResult linucbpp_run(const Instance& inst, std::int64_t T, double beta, Rng& rng,
                       double delta, std::int64_t pull_cap) {
  if (pull_cap < 0) pull_cap = T;
  const SchedulePlan plan = mosspp_schedule(T, beta);
  const int n = inst.num_actions();
  const int D = inst.dim();
  const double mu_star = inst.mean_of_action(inst.best_action());
  RegretTrace trace(pull_cap);
  std::vector<MixtureArm> mixtures;

  std::int64_t t = 0;
  for (int i = 1; i <= plan.p && t < pull_cap; ++i) {
    const int di = static_cast<int>(std::min<std::int64_t>(plan.arm_counts[i - 1], D));
    const int extra = i - 1;
    // Truncated real arms with zero padding; mixture arm j is the unit vector
    // at coordinate d_i + j.
    Mat arms = Mat::Zero(di + extra, n + extra);
    std::vector<int> handles;
    for (int a = 0; a < n; ++a) {
      arms.col(a).head(di) = inst.action_features[a].head(di);
      handles.push_back(a);
    }
    for (int j = 0; j < extra; ++j) {
      arms(di + j, n + j) = 1.0;
      handles.push_back(mixture_handle(j));
    }
    const std::int64_t budget = std::min(plan.lengths[i - 1], pull_cap - t);
    LinUcb alg(std::move(arms),
               linucb_width_multiplier(plan.lengths[i - 1], n + extra, delta));
    const MixtureRuntime mix(mixtures, inst);
    std::vector<std::int64_t> counts(handles.size(), 0);
    for (std::int64_t s = 0; s < budget; ++s) {
      const int pos = alg.choose();
      const int handle = handles[pos];
      const int real = mix.sample(handle, rng);
      const double r = sample_reward(inst, real, rng);
      alg.update(pos, r);
      ++counts[pos];
      trace.step(mu_star, mix.mean_of(inst, handle));
    }
    t += budget;

    MixtureArm arm;
    arm.level = i;
    const double total = static_cast<double>(budget);
    if (budget > 0) {
      for (std::size_t pos = 0; pos < handles.size(); ++pos)
        if (counts[pos] > 0) arm.components.emplace_back(handles[pos], counts[pos] / total);
      mixtures.push_back(std::move(arm));
    }
  }
  return {trace.cumulative(), trace.rounds(), trace.curve()};
}

RunResult linucbpp_corral_run(const Instance& inst, std::int64_t T, double beta,
                              Rng& rng, double delta, std::int64_t pull_cap,
                              std::vector<std::int64_t>* base_pulls) {
  if (pull_cap < 0) pull_cap = T;
  const SchedulePlan plan = mosspp_schedule(T, beta);
  const int n = inst.num_actions();
  const int D = inst.dim();
  const double mu_star = inst.mean_of_action(inst.best_action());
  RegretTrace trace(pull_cap);
  std::vector<MixtureArm> mixtures;
  if (base_pulls) base_pulls->assign(2, 0);

  std::int64_t t = 0;
  for (int i = 1; i <= plan.p && t < pull_cap; ++i) {
    const int di = static_cast<int>(std::min<std::int64_t>(plan.arm_counts[i - 1], D));
    const std::int64_t len = plan.lengths[i - 1];
    const std::int64_t budget = std::min(len, pull_cap - t);

    // Base 1: LinUCB on truncated features. Base 2: UCB over mixture arms.
    Mat arms(di, n);
    for (int a = 0; a < n; ++a) arms.col(a) = inst.action_features[a].head(di);
    LinUcb lin(std::move(arms), linucb_width_multiplier(len, n, delta));
    std::vector<ArmStats> ucb_stats(mixtures.size());
    std::int64_t ucb_rounds = 0;

    const int num_bases = mixtures.empty() ? 1 : 2;
    const double eta_master = 1.0 / std::sqrt(static_cast<double>(di) *
                                              static_cast<double>(std::max<std::int64_t>(len, 2)));
    cb::CorralMaster master(num_bases, eta_master, len);
    const MixtureRuntime mix(mixtures, inst);

    std::vector<std::int64_t> counts_real(n, 0);
    std::vector<std::int64_t> counts_mix(mixtures.size(), 0);
    for (std::int64_t s = 0; s < budget; ++s) {
      const int b = num_bases == 1 ? 0 : master.sample(rng);
      int handle;
      int pos = -1;
      if (b == 0) {
        pos = lin.choose();
        handle = pos;
      } else {
        // UCB over mixture arms; one forced pull each.
        int best = -1;
        for (std::size_t j = 0; j < ucb_stats.size(); ++j) {
          if (ucb_stats[j].count == 0) {
            best = static_cast<int>(j);
            break;
          }
        }
        if (best < 0) {
          double best_score = -std::numeric_limits<double>::infinity();
          for (std::size_t j = 0; j < ucb_stats.size(); ++j) {
            const double score =
                ucb_stats[j].mean() +
                std::sqrt(2.0 * std::log(static_cast<double>(ucb_rounds + 1)) /
                          static_cast<double>(ucb_stats[j].count));
            if (score > best_score) {
              best_score = score;
              best = static_cast<int>(j);
            }
          }
        }
        handle = mixture_handle(best);
      }
      const int real = mix.sample(handle, rng);
      const double r = sample_reward(inst, real, rng);
      if (b == 0) {
        lin.update(pos, r);
        ++counts_real[pos];
      } else {
        auto& st = ucb_stats[mixture_index(handle)];
        st.count += 1;
        st.sum += r;
        ++ucb_rounds;
        ++counts_mix[mixture_index(handle)];
      }
      if (num_bases > 1)
        master.update(b, std::clamp((1.0 - r) / 2.0, 0.0, 1.0));
      if (base_pulls) ++(*base_pulls)[b];
      trace.step(mu_star, mix.mean_of(inst, handle));
    }
    t += budget;

    MixtureArm arm;
    arm.level = i;
    if (budget > 0) {
      const double total = static_cast<double>(budget);
      for (int a = 0; a < n; ++a)
        if (counts_real[a] > 0) arm.components.emplace_back(a, counts_real[a] / total);
      for (std::size_t j = 0; j < counts_mix.size(); ++j)
        if (counts_mix[j] > 0)
          arm.components.emplace_back(mixture_handle(static_cast<int>(j)),
                                      counts_mix[j] / total);
      mixtures.push_back(std::move(arm));
    }
  }
  return {trace.cumulative(), trace.rounds(), trace.curve()};
}

RunResult anytime_wrap(const Instance& inst, AnytimeAlgo algo, std::int64_t T_stop,
                       double beta_or_mu, Rng& rng) {
  RunResult total;
  std::int64_t remaining = T_stop;
  for (int seg = 0; remaining > 0 && seg < 62; ++seg) {
    const std::int64_t horizon = std::int64_t{1} << seg;
    const std::int64_t cap = std::min(horizon, remaining);
    RunResult part;
    switch (algo) {
      case AnytimeAlgo::Mosspp:
        part = mosspp_run(inst, std::max<std::int64_t>(horizon, 2), beta_or_mu,
                          MossppVariant::Vanilla, rng, cap);
        break;
      case AnytimeAlgo::EmpMosspp:
        part = mosspp_run(inst, std::max<std::int64_t>(horizon, 2), beta_or_mu,
                          MossppVariant::Empirical, rng, cap);
        break;
      case AnytimeAlgo::Parallel:
        part = parallel_run(inst, std::max<std::int64_t>(horizon, 4), beta_or_mu, rng);
        break;
      case AnytimeAlgo::LinucbPP:
        part = linucbpp_run(inst, std::max<std::int64_t>(horizon, 2), beta_or_mu, rng,
                            0.05, cap);
        break;
    }
    for (auto [tt, r] : part.curve)
      total.curve.emplace_back(total.rounds + tt, total.cum_regret + r);
    total.cum_regret += part.cum_regret;
    total.rounds += std::min(part.rounds, remaining);
    remaining -= std::min(part.rounds, remaining);
  }
  return total;
}

}  // namespace banditlab::ms
