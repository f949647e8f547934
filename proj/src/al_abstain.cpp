#include "banditlab/al_abstain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace banditlab::al {

void AlInstance::validate() const {
  pool.validate();
  if (members.empty()) throw std::invalid_argument("AlInstance: empty class");
  for (const auto& f : members) {
    if (static_cast<int>(f.size()) != pool.size())
      throw std::invalid_argument("AlInstance: member size mismatch");
    for (double v : f)
      if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("AlInstance: prediction outside [0,1]");
  }
  if (truth >= num_members()) throw std::invalid_argument("AlInstance: bad truth index");
}

namespace {

struct ActiveSet {
  std::vector<char> alive;
  int best = 0;  // argmin cumulative loss
};

ActiveSet active_set(const std::vector<double>& losses, double beta) {
  ActiveSet s;
  s.alive.assign(losses.size(), 0);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < losses.size(); ++f) {
    if (losses[f] < lo) {
      lo = losses[f];
      s.best = static_cast<int>(f);
    }
  }
  for (std::size_t f = 0; f < losses.size(); ++f)
    s.alive[f] = losses[f] <= lo + beta ? 1 : 0;
  return s;
}

struct PointView {
  double lcb, ucb;
  Decision decision;
  bool query;
};

PointView point_view(const AlInstance& inst, const ActiveSet& s, int x, double gamma,
                     bool abstention_veto) {
  PointView v{};
  v.lcb = std::numeric_limits<double>::infinity();
  v.ucb = -std::numeric_limits<double>::infinity();
  for (int f = 0; f < inst.num_members(); ++f) {
    if (!s.alive[f]) continue;
    const double p = inst.members[f][x];
    v.lcb = std::min(v.lcb, p);
    v.ucb = std::max(v.ucb, p);
  }
  const bool abstain = v.lcb >= 0.5 - gamma && v.ucb <= 0.5 + gamma;
  if (abstain) {
    v.decision = Decision::Abstain;
  } else {
    v.decision = inst.members[s.best][x] >= 0.5 ? Decision::One : Decision::Zero;
  }
  const bool uncertain = v.lcb < 0.5 && 0.5 < v.ucb;
  v.query = abstention_veto ? (uncertain && v.decision != Decision::Abstain) : uncertain;
  return v;
}

struct EpochParams {
  std::int64_t T;
  int M;
  double c_delta;
};

EpochParams epoch_params(const AlInstance& inst, double epsilon, double gamma,
                         double delta) {
  if (!(gamma > 0.0 && gamma < 0.5))
    throw std::invalid_argument("epoch_al: gamma outside (0, 1/2)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epoch_al: epsilon <= 0");
  EpochParams p{};
  const double lnF = std::log(static_cast<double>(inst.num_members()));
  p.T = static_cast<std::int64_t>(std::ceil(4.0 * lnF / (epsilon * gamma)));
  if (p.T < 2) p.T = 2;
  p.M = static_cast<int>(std::ceil(std::log2(static_cast<double>(p.T))));
  p.c_delta = 8.0 * std::log(static_cast<double>(inst.num_members()) *
                             static_cast<double>(p.T) / delta);
  return p;
}

AlResult run_epoch_style(const AlInstance& inst, double epsilon, double gamma,
                         double delta, Rng& rng, bool misspecified,
                         bool abstention_veto) {
  inst.validate();
  const EpochParams p = epoch_params(inst, epsilon, gamma, delta);
  const int F = inst.num_members();
  std::vector<double> losses(F, 0.0);
  AlResult out;
  out.horizon = p.T;

  const double tau_last = std::pow(2.0, p.M - 1);
  std::int64_t t = 0;
  std::vector<Decision> classifier(inst.pool.size(), Decision::Zero);
  const std::int64_t csv_stride = std::max<std::int64_t>(1, p.T / 512);
  for (int m = 1; m <= p.M; ++m) {
    const double beta =
        misspecified
            ? (p.M - m + 1) * (2.0 * epsilon * epsilon * tau_last + 2.0 * p.c_delta)
            : (p.M - m + 1) * p.c_delta;
    const ActiveSet s = active_set(losses, beta);
    if (inst.truth >= 0 && !s.alive[inst.truth]) out.truth_eliminated = true;

    std::vector<char> query(inst.pool.size());
    for (int x = 0; x < inst.pool.size(); ++x) {
      const PointView v = point_view(inst, s, x, gamma, abstention_veto);
      classifier[x] = v.decision;
      query[x] = v.query ? 1 : 0;
    }
    const double running_excess = chow_excess(classifier, inst.pool, gamma);
    if (m == p.M) break;  // final epoch only returns the classifier

    const std::int64_t tau_m = std::min<std::int64_t>(std::int64_t{1} << m, p.T);
    for (; t < tau_m; ++t) {
      const int x = rng.categorical(inst.pool.weights);
      const bool q = query[x];
      if (q) {
        const double y = rng.bernoulli(inst.pool.eta[x]) ? 1.0 : 0.0;
        for (int f = 0; f < F; ++f) {
          const double err = inst.members[f][x] - y;
          losses[f] += err * err;
        }
        ++out.labels;
      }
      if (t % csv_stride == 0)
        out.csv_rows.emplace_back(t, out.labels, running_excess);
    }
  }
  out.rounds = t;
  out.classifier = std::move(classifier);
  out.csv_rows.emplace_back(t, out.labels,
                            chow_excess(out.classifier, inst.pool, gamma));
  return out;
}

}  // namespace

std::vector<double> epoch_thresholds(const AlInstance& inst, double epsilon,
                                     double gamma, double delta, bool misspecified) {
  const EpochParams p = epoch_params(inst, epsilon, gamma, delta);
  const double tau_last = std::pow(2.0, p.M - 1);
  std::vector<double> beta(p.M);
  for (int m = 1; m <= p.M; ++m)
    beta[m - 1] =
        misspecified
            ? (p.M - m + 1) * (2.0 * epsilon * epsilon * tau_last + 2.0 * p.c_delta)
            : (p.M - m + 1) * p.c_delta;
  return beta;
}

AlResult epoch_al_run(const AlInstance& inst, double epsilon, double gamma,
                      double delta, Rng& rng) {
  return run_epoch_style(inst, epsilon, gamma, delta, rng, false, true);
}

AlResult mis_al_run(const AlInstance& inst, double epsilon, double gamma,
                    double delta, Rng& rng) {
  return run_epoch_style(inst, epsilon, gamma, delta, rng, true, true);
}

AlResult uncertainty_baseline_run(const AlInstance& inst, double epsilon, double gamma,
                                  double delta, Rng& rng) {
  return run_epoch_style(inst, epsilon, gamma, delta, rng, false, false);
}

AlResult eluder_al_run(const AlInstance& inst, std::int64_t T, double gamma,
                       double delta, Rng& rng, const std::vector<int>* x_stream) {
  inst.validate();
  if (!(gamma > 0.0 && gamma < 0.5))
    throw std::invalid_argument("eluder_al: gamma outside (0, 1/2)");
  const int F = inst.num_members();
  const double beta = 2.0 * std::log(2.0 * F / delta);
  std::vector<double> losses(F, 0.0);
  AlResult out;
  out.horizon = T;
  out.mixture.p0.assign(inst.pool.size(), 0.0);
  out.mixture.p1.assign(inst.pool.size(), 0.0);
  out.mixture.pa.assign(inst.pool.size(), 0.0);

  std::vector<Decision> classifier(inst.pool.size(), Decision::Zero);
  for (std::int64_t t = 0; t < T; ++t) {
    const ActiveSet s = active_set(losses, beta);
    if (inst.truth >= 0 && !s.alive[inst.truth]) out.truth_eliminated = true;
    for (int x = 0; x < inst.pool.size(); ++x) {
      const PointView v = point_view(inst, s, x, gamma, true);
      classifier[x] = v.decision;
      switch (v.decision) {
        case Decision::Zero: out.mixture.p0[x] += 1.0; break;
        case Decision::One: out.mixture.p1[x] += 1.0; break;
        case Decision::Abstain: out.mixture.pa[x] += 1.0; break;
      }
    }
    const int x = x_stream ? (*x_stream)[t % x_stream->size()]
                           : rng.categorical(inst.pool.weights);
    const PointView v = point_view(inst, s, x, gamma, true);
    if (v.query) {
      const double y = rng.bernoulli(inst.pool.eta[x]) ? 1.0 : 0.0;
      for (int f = 0; f < F; ++f) {
        const double err = inst.members[f][x] - y;
        losses[f] += err * err;
      }
      ++out.labels;
    }
  }
  for (int x = 0; x < inst.pool.size(); ++x) {
    out.mixture.p0[x] /= static_cast<double>(T);
    out.mixture.p1[x] /= static_cast<double>(T);
    out.mixture.pa[x] /= static_cast<double>(T);
  }
  out.rounds = T;
  out.classifier = std::move(classifier);  // last-round classifier
  return out;
}

double randomize_abstention_error(const std::vector<Decision>& classifier,
                                  const LabelPool& pool) {
  return randomized_standard_error(classifier, pool);
}

}  // namespace banditlab::al
