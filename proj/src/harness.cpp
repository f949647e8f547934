#include "banditlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "banditlab/ms_regret.hpp"
#include "banditlab/parallel.hpp"

namespace banditlab::harness {

namespace {

std::vector<Vec> basis_features(int n) {
  std::vector<Vec> feats;
  feats.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec v = Vec::Zero(n);
    v[i] = 1.0;
    feats.push_back(std::move(v));
  }
  return feats;
}

Instance tabular_bernoulli(std::vector<double> means) {
  const int n = static_cast<int>(means.size());
  Instance inst;
  inst.action_features = basis_features(n);
  inst.target_features = inst.action_features;
  inst.theta_star = Eigen::Map<Vec>(means.data(), n);
  inst.intrinsic_dim = n;
  inst.noise = NoiseKind::Bernoulli;
  inst.sigma = 0.0;
  inst.validate();
  return inst;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

Instance gen_multiple_best_arms(int n, double alpha, std::int64_t T, Rng& rng,
                                double best_mean, std::vector<double> sub_means) {
  const int m = static_cast<int>(
      std::ceil(n / (2.0 * std::pow(static_cast<double>(T), alpha))));
  return gen_caption_style(n, std::max(1, m), rng, best_mean, std::move(sub_means));
}

Instance gen_caption_style(int n, int m, Rng& rng, double best_mean,
                           std::vector<double> sub_means) {
  if (m > n || m < 1) throw std::invalid_argument("gen_caption_style: m out of range");
  std::vector<double> means(n);
  for (int i = 0; i < n; ++i)
    means[i] = i < m ? best_mean : sub_means[(i - m) % sub_means.size()];
  // Shuffle so the best arms are not index-identifiable.
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(i + 1));
    std::swap(means[i], means[j]);
  }
  return tabular_bernoulli(std::move(means));
}

Instance gen_linear_intrinsic(int d, int K, int dstar, double sigma, Rng& rng) {
  if (dstar < 1 || dstar > d) throw std::invalid_argument("gen_linear_intrinsic: dstar");
  std::vector<Vec> arms;
  arms.reserve(K);
  for (int a = 0; a < K; ++a) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    const double norm = v.norm();
    const double radius = std::pow(rng.uniform(), 1.0 / d);
    v *= radius / (norm > 0 ? norm : 1.0);
    arms.push_back(std::move(v));
  }
  Vec theta = Vec::Zero(d);
  for (int i = 0; i < dstar; ++i) theta[i] = 1.0 / std::sqrt(static_cast<double>(dstar));
  return make_instance(std::move(arms), std::move(theta), dstar, NoiseKind::Gaussian,
                       sigma, {}, /*unit_norm=*/true);
}

Instance gen_hard_instance(int dstar, double eps) {
  if (dstar < 1) throw std::invalid_argument("gen_hard_instance: dstar < 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("gen_hard_instance: eps");
  const int D = dstar + 1;
  std::vector<Vec> arms;
  for (int i = 0; i < dstar; ++i) {
    Vec v = Vec::Zero(D);
    v[i] = 1.0;
    arms.push_back(std::move(v));
  }
  Vec runner = Vec::Zero(D);
  runner[dstar - 1] = 1.0 - eps;
  runner[dstar] = 1.0;
  arms.push_back(std::move(runner));
  Vec theta = Vec::Zero(D);
  theta[dstar - 1] = 1.0;
  return make_instance(std::move(arms), std::move(theta), dstar, NoiseKind::Gaussian,
                       1.0);
}

Instance gen_duplicate_augmented(const Instance& base, int copies) {
  Instance inst = base;
  if (copies <= 0 || base.action_features.empty()) return inst;
  const Vec last = base.action_features.back();
  for (int c = 0; c < copies; ++c) inst.action_features.push_back(last);
  if (!base.target_features.empty() &&
      base.target_features.size() == base.action_features.size()) {
    for (int c = 0; c < copies; ++c) inst.target_features.push_back(last);
  }
  inst.validate();
  return inst;
}

al::AlInstance gen_massart_pool(int points, double lo, double hi, int members,
                                Rng& rng) {
  if (points < 1 || members < 2) throw std::invalid_argument("gen_massart_pool");
  al::AlInstance inst;
  inst.pool.weights.assign(points, 1.0 / points);
  inst.pool.eta.resize(points);
  for (int x = 0; x < points; ++x) inst.pool.eta[x] = x % 2 == 0 ? hi : lo;
  // Truth plus random lo/hi labelings.
  inst.members.push_back(inst.pool.eta);
  inst.truth = 0;
  while (static_cast<int>(inst.members.size()) < members) {
    std::vector<double> f(points);
    for (int x = 0; x < points; ++x) f[x] = rng.bernoulli(0.5) ? hi : lo;
    if (f == inst.pool.eta) continue;
    inst.members.push_back(std::move(f));
  }
  inst.validate();
  return inst;
}

al::AlInstance gen_noise_seeking(double p_easy, int theta1_grid,
                                 double theta1_halfwidth) {
  if (!(p_easy > 0.0 && p_easy < 1.0)) throw std::invalid_argument("gen_noise_seeking");
  al::AlInstance inst;
  // Two-region pool: hard mass at eta = theta1* = 1/2 (phi2 = 0), easy mass
  // p at eta = theta1* + theta2* = 1.
  inst.pool.weights = {1.0 - p_easy, p_easy};
  inst.pool.eta = {0.5, 1.0};
  for (int g = 0; g < theta1_grid; ++g) {
    const double theta1 =
        theta1_grid == 1
            ? 0.5
            : 0.5 - theta1_halfwidth + 2.0 * theta1_halfwidth * g / (theta1_grid - 1);
    for (const double theta2 : {0.5, -0.5}) {
      std::vector<double> f = {theta1, std::clamp(theta1 + theta2, 0.0, 1.0)};
      inst.members.push_back(std::move(f));
      if (theta1 == 0.5 && theta2 == 0.5)
        inst.truth = static_cast<int>(inst.members.size()) - 1;
    }
  }
  inst.validate();
  return inst;
}

al::AlInstance gen_perturbed_realizable(int points, double kappa, Rng& rng) {
  al::AlInstance inst;
  inst.pool.weights.assign(points, 1.0 / points);
  inst.pool.eta.resize(points);
  std::vector<double> fbar(points);
  for (int x = 0; x < points; ++x) {
    fbar[x] = x % 2 == 0 ? 0.9 : 0.1;
    const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
    inst.pool.eta[x] = std::clamp(fbar[x] + sign * kappa, 0.0, 1.0);
  }
  inst.members.push_back(fbar);
  inst.truth = 0;  // best approximator, within kappa of eta
  inst.kappa = kappa;
  for (int x = 0; x < points; ++x) {
    std::vector<double> f = fbar;
    f[x] = 1.0 - f[x];
    inst.members.push_back(std::move(f));
  }
  inst.validate();
  return inst;
}

void save_al_instance(const al::AlInstance& inst, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << inst.pool.size() << ' ' << inst.num_members() << '\n';
  for (int x = 0; x < inst.pool.size(); ++x)
    os << fmt(inst.pool.weights[x]) << ' ' << fmt(inst.pool.eta[x]) << '\n';
  for (const auto& f : inst.members) {
    for (int x = 0; x < inst.pool.size(); ++x) {
      if (x) os << ' ';
      os << fmt(f[x]);
    }
    os << '\n';
  }
  os << "truth=" << inst.truth << " kappa=" << fmt(inst.kappa) << '\n';
}

al::AlInstance load_al_instance(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  int N = 0, M = 0;
  if (!(is >> N >> M) || N < 1 || M < 1)
    throw std::runtime_error("al pool file: bad header");
  al::AlInstance inst;
  inst.pool.weights.resize(N);
  inst.pool.eta.resize(N);
  for (int x = 0; x < N; ++x)
    if (!(is >> inst.pool.weights[x] >> inst.pool.eta[x]))
      throw std::runtime_error("al pool file: truncated pool rows");
  inst.members.assign(M, std::vector<double>(N));
  for (int f = 0; f < M; ++f)
    for (int x = 0; x < N; ++x)
      if (!(is >> inst.members[f][x]))
        throw std::runtime_error("al pool file: truncated member rows");
  std::string token;
  while (is >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw std::runtime_error("al pool file: bad metadata");
    const std::string key = token.substr(0, eq), val = token.substr(eq + 1);
    if (key == "truth") inst.truth = std::stoi(val);
    else if (key == "kappa") inst.kappa = std::stod(val);
    else throw std::runtime_error("al pool file: unknown key " + key);
  }
  inst.validate();
  return inst;
}

std::pair<double, double> bootstrap_ci(std::span<const double> samples, double level,
                                       int resamples, Rng& rng) {
  if (samples.size() < 2) throw std::invalid_argument("bootstrap_ci: need >= 2 samples");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("bootstrap_ci: level");
  const int n = static_cast<int>(samples.size());
  std::vector<double> means(resamples);
  for (int r = 0; r < resamples; ++r) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += samples[rng.index(n)];
    means[r] = total / n;
  }
  std::sort(means.begin(), means.end());
  const double alpha = (1.0 - level) / 2.0;
  auto pick = [&](double q) {
    auto idx = static_cast<std::size_t>(q * (resamples - 1));
    return means[std::min(idx, means.size() - 1)];
  };
  return {pick(alpha), pick(1.0 - alpha)};
}

std::optional<std::int64_t> estimate_tau(
    const std::vector<std::pair<std::int64_t, int>>& trace, int truth,
    std::int64_t cap) {
  if (trace.empty()) return std::nullopt;
  // The recommendation is a step function of the sample count; find the last
  // moment it was wrong.
  std::int64_t last_wrong = -1;
  for (const auto& [samples, rec] : trace) {
    if (samples > cap) break;
    if (rec != truth) last_wrong = samples;
  }
  const auto& final_event = trace.back();
  if (final_event.second != truth && final_event.first <= cap) return std::nullopt;
  // Find the first correct event at or after last_wrong.
  for (const auto& [samples, rec] : trace) {
    if (samples > cap) break;
    if (samples >= last_wrong && rec == truth) return samples;
  }
  return std::nullopt;
}

double ExperimentConfig::param_d(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : std::stod(it->second);
}

std::int64_t ExperimentConfig::param_i(const std::string& key,
                                       std::int64_t fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : std::stoll(it->second);
}

std::string ExperimentConfig::param_s(const std::string& key,
                                      const std::string& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::string MetricTable::to_string() const {
  std::ostringstream os;
  for (const auto& m : meta) os << "# " << m << '\n';
  os << "trial,t,metric,value\n";
  for (const auto& r : rows)
    os << r.trial << ',' << r.t << ',' << r.metric << ',' << fmt(r.value) << '\n';
  return os.str();
}

void MetricTable::write(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << to_string();
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::map<std::string, std::string> cfg;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) cfg[key] = val;
  }
  return cfg;
}

MetricTable run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("run_experiment: trials < 1");
  if (cfg.horizon < 1) throw std::invalid_argument("run_experiment: horizon < 1");
  MetricTable table;
  table.meta.push_back("algo = " + cfg.algo);
  table.meta.push_back("seed = " + std::to_string(cfg.seed));
  table.meta.push_back("trials = " + std::to_string(cfg.trials));
  table.meta.push_back("T = " + std::to_string(cfg.horizon));

  // The instance is generated once (from the run seed) or loaded; trials only
  // vary the sampling randomness.
  Instance inst;
  if (!cfg.instance_path.empty()) {
    inst = load_instance(cfg.instance_path);
    table.meta.push_back("instance = " + cfg.instance_path);
  } else {
    Rng gen_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    const auto n = static_cast<int>(cfg.param_i("n", 2000));
    const double alpha = cfg.param_d("alpha", 0.25);
    if (cfg.algo == "linucb" || cfg.algo == "linucbpp" || cfg.algo == "linucbpp-corral") {
      inst = gen_linear_intrinsic(static_cast<int>(cfg.param_i("d", 120)),
                                  static_cast<int>(cfg.param_i("K", 240)),
                                  static_cast<int>(cfg.param_i("dstar", 12)),
                                  cfg.param_d("sigma", 0.1), gen_rng);
      table.meta.push_back("instance = linear-intrinsic");
    } else {
      inst = gen_multiple_best_arms(n, alpha, cfg.horizon, gen_rng);
      table.meta.push_back("instance = multiple-best-arms");
    }
  }
  const double beta = cfg.param_d("beta", 0.5);
  const double delta = cfg.param_d("delta", 0.05);
  const double mu_star = inst.mean_of_action(inst.best_action());

  struct TrialOut {
    std::vector<std::pair<std::int64_t, double>> curve;
    double final_regret = 0.0;
  };
  std::vector<TrialOut> outs(cfg.trials);
  par::for_each_trial(cfg.trials, [&](int trial) {
    Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(trial));
    ms::RunResult res;
    if (cfg.algo == "moss") {
      res = ms::moss_run(inst, cfg.horizon, rng);
    } else if (cfg.algo == "mosspp") {
      res = ms::mosspp_run(inst, cfg.horizon, beta, ms::MossppVariant::Vanilla, rng);
    } else if (cfg.algo == "empmosspp") {
      res = ms::mosspp_run(inst, cfg.horizon, beta, ms::MossppVariant::Empirical, rng);
    } else if (cfg.algo == "parallel") {
      res = ms::parallel_run(inst, cfg.horizon, mu_star, rng);
    } else if (cfg.algo == "linucb") {
      res = ms::linucb_run(inst, cfg.horizon, delta, rng);
    } else if (cfg.algo == "linucbpp") {
      res = ms::linucbpp_run(inst, cfg.horizon, beta, rng, delta);
    } else if (cfg.algo == "linucbpp-corral") {
      res = ms::linucbpp_corral_run(inst, cfg.horizon, beta, rng, delta);
    } else {
      throw std::invalid_argument("run_experiment: unknown algorithm " + cfg.algo);
    }
    outs[trial].curve = res.curve;
    outs[trial].final_regret = res.cum_regret;
  });

  // Merge in trial order so output is identical for any thread count.
  for (int trial = 0; trial < cfg.trials; ++trial) {
    for (const auto& [t, r] : outs[trial].curve)
      table.rows.push_back({trial, t, "cum_regret", r});
    table.rows.push_back({trial, cfg.horizon, "final_regret", outs[trial].final_regret});
  }

  // Cross-trial summary rows: mean +/- 0.5 std band of the final regret.
  double mean = 0.0;
  for (const auto& o : outs) mean += o.final_regret;
  mean /= cfg.trials;
  double var = 0.0;
  for (const auto& o : outs) var += (o.final_regret - mean) * (o.final_regret - mean);
  const double sd = cfg.trials > 1 ? std::sqrt(var / (cfg.trials - 1)) : 0.0;
  table.rows.push_back({-1, cfg.horizon, "final_regret_mean", mean});
  table.rows.push_back({-1, cfg.horizon, "final_regret_band_lo", mean - 0.5 * sd});
  table.rows.push_back({-1, cfg.horizon, "final_regret_band_hi", mean + 0.5 * sd});

  if (!cfg.out_path.empty()) table.write(cfg.out_path);
  return table;
}

}  // namespace banditlab::harness
