#include "banditlab/cb_policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "banditlab/benchmarks.hpp"

namespace banditlab::cb {

namespace {

int argmax_linear(const std::vector<Vec>& embeddings, const Vec& ghat) {
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < embeddings.size(); ++a) {
    const double v = embeddings[a].dot(ghat);
    if (v > best_val) {
      best_val = v;
      best = static_cast<int>(a);
    }
  }
  return best;
}

}  // namespace

ActionDistribution spanner_greedy_policy(const ActionDistribution& design,
                                         int greedy_action, double epsilon) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("spanner_greedy_policy: epsilon outside [0,1]");
  if (epsilon == 1.0) return design;
  if (epsilon == 0.0) return ActionDistribution::point_mass(greedy_action);
  return mix_with_point_mass(design, epsilon, greedy_action);
}

double solve_lambda(std::span<const double> gaps, std::span<const double> q_weights,
                    double eta) {
  if (gaps.size() != q_weights.size() || gaps.empty())
    throw std::invalid_argument("solve_lambda: bad inputs");
  double mass = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] < -1e-12) throw std::invalid_argument("solve_lambda: negative gap");
    mass += q_weights[i];
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw std::invalid_argument("solve_lambda: weights do not sum to 1");
  auto h = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i)
      s += q_weights[i] / (lambda + eta * std::max(gaps[i], 0.0));
    return s;
  };
  double lo = 0.5, hi = 1.0;
  const double h_lo = h(lo), h_hi = h(hi);
  if (h_lo < 1.0 - 1e-9 || h_hi > 1.0 + 1e-9)
    throw std::invalid_argument("solve_lambda: balance equation has no root in [1/2,1]");
  if (h_lo <= 1.0) return lo;
  if (h_hi >= 1.0) return hi;
  while (hi - lo > 5e-14) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > 1.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

IgwRound spanner_igw_round(const std::vector<Vec>& embeddings, const Vec& ghat,
                           const IgwConfig& cfg, IgwMode mode) {
  const int d = static_cast<int>(ghat.size());
  IgwRound out;
  const auto oracle = spanner::make_exhaustive_oracle(embeddings);
  out.greedy = oracle(ghat);
  auto [init, r] = spanner::init_spanner_set(embeddings);
  r = std::min(r, 0.99);  // grid-depth certificate must stay inside (0,1)

  auto gap_of = [&](int a) {
    const double g = (embeddings[out.greedy] - embeddings[a]).dot(ghat);
    return g > 0.0 ? g : 0.0;
  };

  if (mode == IgwMode::Exact) {
    spanner::ReweightParams params;
    params.eta = cfg.eta_for(d);
    params.ghat = ghat;
    params.ahat = out.greedy;
    params.r_init = r;
    params.offset = 0.0;
    out.span = spanner::reweighted_spanner(embeddings, params, cfg.spanner_C,
                                           init.members, oracle);
    // q = 1/2 design + 1/2 delta at the greedy action.
    ActionDistribution q;
    const double w = 0.5 / d;
    for (int m : out.span.members) q.add_mass(m, w);
    q.add_mass(out.greedy, 0.5);
    std::vector<double> gaps(q.support.size());
    for (std::size_t i = 0; i < q.support.size(); ++i) gaps[i] = gap_of(q.support[i]);
    const double lambda = solve_lambda(gaps, q.weights, params.eta);
    ActionDistribution p;
    p.support = q.support;
    p.weights.resize(q.weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < q.support.size(); ++i) {
      p.weights[i] = q.weights[i] / (lambda + params.eta * gaps[i]);
      total += p.weights[i];
    }
    for (double& w2 : p.weights) w2 /= total;  // |total - 1| <= bisection tolerance
    out.dist = std::move(p);
    return out;
  }

  // Practical variant: modified reweighting with a 1 + d offset, per-atom
  // weights 1/(dbar + (gamma/4d) gap), remainder to the greedy action.
  spanner::ReweightParams params;
  params.eta = cfg.gamma / (4.0 * d);
  params.ghat = ghat;
  params.ahat = out.greedy;
  params.r_init = r;
  params.offset = static_cast<double>(d);
  out.span = spanner::reweighted_spanner(embeddings, params, cfg.spanner_C,
                                         init.members, oracle);
  bool greedy_in_span = false;
  for (int m : out.span.members) greedy_in_span |= (m == out.greedy);
  const double dbar = static_cast<double>(out.span.members.size() + (greedy_in_span ? 0 : 1));
  ActionDistribution p;
  double total = 0.0;
  for (int m : out.span.members) {
    const double w = 1.0 / (dbar + params.eta * gap_of(m));
    p.add_mass(m, w);
    total += w;
  }
  double remainder = 1.0 - total;
  if (remainder < 0.0) {
    out.clamped = true;  // q(greedy) fell below 1/2; renormalize instead
    for (double& w : p.weights) w /= total;
  } else {
    p.add_mass(out.greedy, remainder);
  }
  out.dist = std::move(p);
  return out;
}

IgwRound spanner_greedy_round(const std::vector<Vec>& embeddings, const Vec& ghat,
                              const IgwConfig& cfg) {
  const int d = static_cast<int>(ghat.size());
  IgwRound out;
  const auto oracle = spanner::make_exhaustive_oracle(embeddings);
  out.greedy = oracle(ghat);
  out.span = spanner::barycentric_spanner(embeddings, cfg.spanner_C, oracle);
  out.dist = spanner_greedy_policy(spanner::spanner_to_design(out.span), out.greedy,
                                   cfg.epsilon_for(d));
  return out;
}

std::vector<double> smooth_igw_distribution(std::span<const double> fhat_losses,
                                            double gamma, double h) {
  const int K = static_cast<int>(fhat_losses.size());
  if (K == 0) throw std::invalid_argument("smooth_igw_distribution: empty");
  int greedy = 0;
  for (int a = 1; a < K; ++a)
    if (fhat_losses[a] < fhat_losses[greedy]) greedy = a;
  std::vector<double> p(K);
  double mass = 0.0;
  for (int a = 0; a < K; ++a) {
    const double m = 1.0 / (1.0 + h * gamma * (fhat_losses[a] - fhat_losses[greedy]));
    p[a] = m / K;
    mass += m / K;
  }
  p[greedy] += 1.0 - mass;
  return p;
}

int smooth_igw_action(std::span<const double> fhat_losses, double gamma, double h,
                      Rng& rng) {
  const int K = static_cast<int>(fhat_losses.size());
  int greedy = 0;
  for (int a = 1; a < K; ++a)
    if (fhat_losses[a] < fhat_losses[greedy]) greedy = a;
  const int a = rng.index(K);
  const double m = 1.0 / (1.0 + h * gamma * (fhat_losses[a] - fhat_losses[greedy]));
  return rng.bernoulli(m) ? a : greedy;
}

CorralMaster::CorralMaster(int num_bases, double eta_master, std::int64_t horizon) {
  if (num_bases < 1) throw std::invalid_argument("CorralMaster: no bases");
  if (eta_master <= 0.0) throw std::invalid_argument("CorralMaster: eta <= 0");
  if (horizon < 2) horizon = 2;
  q_.assign(num_bases, 1.0 / num_bases);
  qbar_ = q_;
  eta_.assign(num_bases, eta_master);
  rho_.assign(num_bases, 2.0 * num_bases);
  mix_ = 1.0 / static_cast<double>(horizon);
  beta_ = std::exp(1.0 / std::log(static_cast<double>(horizon)));
}

int CorralMaster::sample(Rng& rng) { return rng.categorical(qbar_); }

void CorralMaster::update(int sampled, double loss) {
  const int B = static_cast<int>(q_.size());
  std::vector<double> iw(B, 0.0);
  iw[sampled] = loss / qbar_[sampled];

  // Log-barrier OMD step: find the normalizer making the new weights a
  // distribution, then update.
  double lo = *std::min_element(iw.begin(), iw.end());
  double hi = *std::max_element(iw.begin(), iw.end());
  auto total = [&](double lambda) {
    double s = 0.0;
    for (int b = 0; b < B; ++b) {
      const double denom = 1.0 / qbar_[b] + eta_[b] * (iw[b] - lambda);
      if (denom <= 0.0) return std::numeric_limits<double>::infinity();
      s += 1.0 / denom;
    }
    return s;
  };
  if (hi <= lo) {
    // Zero loss vector: weights unchanged.
  } else {
    for (int it = 0; it < 64; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (total(mid) < 1.0) lo = mid;
      else hi = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    double s = 0.0;
    for (int b = 0; b < B; ++b) {
      q_[b] = 1.0 / (1.0 / qbar_[b] + eta_[b] * (iw[b] - lambda));
      s += q_[b];
    }
    for (int b = 0; b < B; ++b) q_[b] /= s;
  }
  for (int b = 0; b < B; ++b)
    qbar_[b] = (1.0 - mix_) * q_[b] + mix_ / B;
  for (int b = 0; b < B; ++b) {
    if (1.0 / qbar_[b] > rho_[b]) {
      rho_[b] = 2.0 / qbar_[b];
      eta_[b] *= beta_;
    }
  }
}

namespace {

// Shared loop for spanner-based runners. `policy` maps (embeddings, ghat) to
// a sampling distribution.
CbRunResult run_spanner_policy(
    const ContextualInstance& inst, std::int64_t T, std::uint64_t seed,
    const std::function<IgwRound(const std::vector<Vec>&, const Vec&)>& policy) {
  CbRunResult out;
  Rng ctx_rng(seed ^ 0x1e7ull);
  Rng act_rng(seed ^ 0x2e7ull);
  Rng reward_rng(seed ^ 0x3e7ull);
  const int d = inst.dim();
  RidgeOracle oracle(d, 1.0);
  std::vector<std::vector<Vec>> tables(inst.num_contexts());
  for (int c = 0; c < inst.num_contexts(); ++c) {
    tables[c].reserve(inst.num_actions(c));
    for (int a = 0; a < inst.num_actions(c); ++a)
      tables[c].push_back(inst.context_embeddings[c].col(a));
  }
  std::vector<double> best_mean(inst.num_contexts());
  for (int c = 0; c < inst.num_contexts(); ++c) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < inst.num_actions(c); ++a)
      best = std::max(best, inst.mean_reward(c, a));
    best_mean[c] = best;
  }
  out.actions.reserve(T);
  for (std::int64_t t = 0; t < T; ++t) {
    const int ctx = inst.num_contexts() == 1 ? 0 : ctx_rng.index(inst.num_contexts());
    IgwRound round = policy(tables[ctx], oracle.estimate());
    out.clamped_rounds += round.clamped ? 1 : 0;
    const int a = round.dist.sample(act_rng);
    const double r = inst.sample_reward(ctx, a, reward_rng);
    oracle.update(1.0, tables[ctx][a], r);
    out.actions.push_back(a);
    out.cum_regret += best_mean[ctx] - inst.mean_reward(ctx, a);
  }
  return out;
}

}  // namespace

CbRunResult run_spanner_greedy(const ContextualInstance& inst, std::int64_t T,
                               const IgwConfig& cfg, std::uint64_t seed) {
  return run_spanner_policy(inst, T, seed,
                            [&](const std::vector<Vec>& embeddings, const Vec& ghat) {
                              return spanner_greedy_round(embeddings, ghat, cfg);
                            });
}

CbRunResult run_spanner_igw(const ContextualInstance& inst, std::int64_t T,
                            const IgwConfig& cfg, IgwMode mode, std::uint64_t seed) {
  return run_spanner_policy(inst, T, seed,
                            [&](const std::vector<Vec>& embeddings, const Vec& ghat) {
                              return spanner_igw_round(embeddings, ghat, cfg, mode);
                            });
}

SmoothIgwBase::SmoothIgwBase(double h, double regsq, std::int64_t horizon,
                             FiniteClassOracle oracle)
    : h_(h), regsq_(regsq), horizon_(horizon), oracle_(std::move(oracle)) {
  if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("SmoothIgwBase: h outside (0,1]");
}

int SmoothIgwBase::act(const ContextualInstance& inst, int ctx, double q, double rho,
                       Rng& rng) {
  const int K = inst.num_actions(ctx);
  std::vector<double> losses(K);
  for (int a = 0; a < K; ++a) losses[a] = oracle_.predict(ctx, a);
  const double gamma =
      std::sqrt(8.0 * static_cast<double>(horizon_) / (h_ * rho * regsq_));
  last_weight_ = gamma / q;
  return smooth_igw_action(losses, gamma, h_, rng);
}

void SmoothIgwBase::observe(int ctx, int action, double loss) {
  oracle_.update(last_weight_, ctx, action, loss);
}

namespace {

double smooth_benchmark_of_context(const ContextualInstance& inst, int ctx, double h) {
  const int K = inst.num_actions(ctx);
  std::vector<double> losses(K);
  for (int a = 0; a < K; ++a) losses[a] = 1.0 - inst.mean_reward(ctx, a);
  return smooth_benchmark(losses, h);
}

}  // namespace

CorralRunResult corral_adapt(const ContextualInstance& inst, std::int64_t T,
                             double eta_master, std::uint64_t seed, double regsq,
                             const std::function<FiniteClassOracle()>& oracle_factory,
                             int num_bases, double eval_h) {
  const int B = num_bases > 0
                    ? num_bases
                    : std::max<int>(1, static_cast<int>(std::ceil(
                                           std::log2(static_cast<double>(std::max<std::int64_t>(T, 2))))));
  CorralMaster master(B, eta_master, T);
  std::vector<SmoothIgwBase> bases;
  bases.reserve(B);
  for (int b = 1; b <= B; ++b)
    bases.emplace_back(std::pow(2.0, -b), regsq, T, oracle_factory());

  Rng master_rng(seed ^ 0xc0ull);
  Rng ctx_rng(seed ^ 0xc1ull);
  Rng reward_rng(seed ^ 0xc2ull);
  std::vector<Rng> act_rngs;
  for (int b = 0; b < B; ++b) act_rngs.emplace_back(seed ^ (0xb000ull + b));

  CorralRunResult out;
  out.base_pulls.assign(B, 0);
  for (std::int64_t t = 0; t < T; ++t) {
    const int ctx = inst.num_contexts() == 1 ? 0 : ctx_rng.index(inst.num_contexts());
    const int b = master.sample(master_rng);
    const double q = master.q(b), rho = master.rho(b);
    const int a = bases[b].act(inst, ctx, q, rho, act_rngs[b]);
    const double loss = inst.sample_loss(ctx, a, reward_rng);
    bases[b].observe(ctx, a, loss);
    master.update(b, std::clamp(loss, 0.0, 1.0));
    ++out.base_pulls[b];
    out.smooth.cum_loss += 1.0 - inst.mean_reward(ctx, a);
    out.smooth.cum_smooth_regret +=
        (1.0 - inst.mean_reward(ctx, a)) - smooth_benchmark_of_context(inst, ctx, eval_h);
    ++out.smooth.rounds;
  }
  out.final_q = master.distribution();
  return out;
}

CorralRunResult run_single_smooth_base(const ContextualInstance& inst, std::int64_t T,
                                       double h, std::uint64_t seed, double regsq,
                                       const std::function<FiniteClassOracle()>& oracle_factory,
                                       double q, double rho) {
  SmoothIgwBase base(h, regsq, T, oracle_factory());
  Rng ctx_rng(seed ^ 0xc1ull);
  Rng reward_rng(seed ^ 0xc2ull);
  Rng act_rng(seed ^ 0xb000ull);
  CorralRunResult out;
  out.base_pulls.assign(1, 0);
  for (std::int64_t t = 0; t < T; ++t) {
    const int ctx = inst.num_contexts() == 1 ? 0 : ctx_rng.index(inst.num_contexts());
    const int a = base.act(inst, ctx, q, rho, act_rng);
    const double loss = inst.sample_loss(ctx, a, reward_rng);
    base.observe(ctx, a, loss);
    ++out.base_pulls[0];
    out.smooth.cum_loss += 1.0 - inst.mean_reward(ctx, a);
    out.smooth.cum_smooth_regret +=
        (1.0 - inst.mean_reward(ctx, a)) - smooth_benchmark_of_context(inst, ctx, h);
    ++out.smooth.rounds;
  }
  out.final_q = {1.0};
  return out;
}

}  // namespace banditlab::cb
