#include "banditlab/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace banditlab {

namespace {

double clip(double v, const std::optional<std::pair<double, double>>& range) {
  if (!range) return v;
  return std::min(std::max(v, range->first), range->second);
}

}  // namespace

double Instance::mean_reward(const Vec& x) const { return theta_star.dot(x); }

int Instance::best_action() const {
  int best = 0;
  double best_val = mean_of_action(0);
  for (int a = 1; a < num_actions(); ++a) {
    const double v = mean_of_action(a);
    if (v > best_val) {
      best_val = v;
      best = a;
    }
  }
  return best;
}

int Instance::best_target() const {
  int best = 0;
  double best_val = mean_of_target(0);
  for (int z = 1; z < num_targets(); ++z) {
    const double v = mean_of_target(z);
    if (v > best_val) {
      best_val = v;
      best = z;
    }
  }
  return best;
}

void Instance::validate() const {
  const int D = dim();
  if (D <= 0) throw std::invalid_argument("Instance: empty parameter vector");
  if (action_features.empty()) throw std::invalid_argument("Instance: no actions");
  if (intrinsic_dim < 0 || intrinsic_dim > D)
    throw std::invalid_argument("Instance: intrinsic_dim out of range");
  for (int i = intrinsic_dim; i < D; ++i)
    if (theta_star[i] != 0.0)
      throw std::invalid_argument("Instance: theta_star nonzero past intrinsic_dim");
  auto check_vec = [&](const Vec& v, const char* what) {
    if (static_cast<int>(v.size()) != D)
      throw std::invalid_argument(std::string("Instance: dimension mismatch in ") + what);
    if (unit_norm && v.norm() > 1.0 + 1e-9)
      throw std::invalid_argument(std::string("Instance: feature norm > 1 in ") + what);
  };
  for (const Vec& v : action_features) check_vec(v, "action_features");
  for (const Vec& v : target_features) check_vec(v, "target_features");
  if (unit_norm && theta_star.norm() > 1.0 + 1e-9)
    throw std::invalid_argument("Instance: ||theta_star|| > 1");
  if (noise == NoiseKind::Bernoulli) {
    for (int a = 0; a < num_actions(); ++a) {
      const double m = mean_of_action(a);
      if (m < -1e-12 || m > 1.0 + 1e-12)
        throw std::invalid_argument("Instance: bernoulli mean outside [0,1]");
    }
  }
  if (require_span) {
    Mat X(D, num_actions());
    for (int a = 0; a < num_actions(); ++a) X.col(a) = action_features[a];
    Eigen::ColPivHouseholderQR<Mat> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < D)
      throw std::invalid_argument("Instance: actions do not span the ambient space");
  }
}

Instance make_instance(std::vector<Vec> actions, Vec theta_star, int intrinsic_dim,
                       NoiseKind noise, double sigma, std::vector<Vec> targets,
                       bool unit_norm, bool require_span) {
  Instance inst;
  inst.action_features = std::move(actions);
  inst.target_features = targets.empty() ? inst.action_features : std::move(targets);
  inst.theta_star = std::move(theta_star);
  inst.intrinsic_dim = intrinsic_dim;
  inst.noise = noise;
  inst.sigma = sigma;
  inst.unit_norm = unit_norm;
  inst.require_span = require_span;
  inst.validate();
  return inst;
}

double sample_reward(const Instance& inst, int action_index, Rng& rng) {
  if (action_index < 0 || action_index >= inst.num_actions())
    throw std::out_of_range("sample_reward: action index");
  const double mean = inst.mean_of_action(action_index);
  if (inst.noise == NoiseKind::Bernoulli) {
    if (mean < 0.0 || mean > 1.0)
      throw std::invalid_argument("sample_reward: bernoulli mean outside [0,1]");
    return rng.bernoulli(mean) ? 1.0 : 0.0;
  }
  return clip(mean + inst.sigma * rng.normal(), inst.reward_clip);
}

double sample_reward_sum(const Instance& inst, int action_index, std::int64_t count,
                         Rng& rng) {
  if (count <= 0) return 0.0;
  const double mean = inst.mean_of_action(action_index);
  if (inst.noise == NoiseKind::Gaussian && !inst.reward_clip)
    return rng.normal_sum(mean, inst.sigma, count);
  double total = 0.0;
  for (std::int64_t i = 0; i < count; ++i) total += sample_reward(inst, action_index, rng);
  return total;
}

namespace {

void write_vec(std::ostream& os, const Vec& v) {
  char buf[64];
  for (int i = 0; i < v.size(); ++i) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v[i]);
    (void)ec;
    if (i) os << ' ';
    os.write(buf, ptr - buf);
  }
  os << '\n';
}

Vec read_vec(std::istream& is, int d) {
  Vec v(d);
  for (int i = 0; i < d; ++i)
    if (!(is >> v[i])) throw std::runtime_error("instance file: truncated vector row");
  return v;
}

}  // namespace

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << inst.dim() << ' ' << inst.num_actions() << ' ' << inst.num_targets() << '\n';
  for (const Vec& v : inst.action_features) write_vec(os, v);
  for (const Vec& v : inst.target_features) write_vec(os, v);
  write_vec(os, inst.theta_star);
  os << "noise=" << (inst.noise == NoiseKind::Gaussian ? "gaussian" : "bernoulli")
     << " sigma=";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), inst.sigma);
  (void)ec;
  os.write(buf, ptr - buf);
  os << " dstar=" << inst.intrinsic_dim << '\n';
}

Instance load_instance(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  int D = 0, K = 0, M = 0;
  if (!(is >> D >> K >> M) || D <= 0 || K <= 0 || M < 0)
    throw std::runtime_error("instance file: bad header");
  Instance inst;
  inst.action_features.reserve(K);
  for (int i = 0; i < K; ++i) inst.action_features.push_back(read_vec(is, D));
  inst.target_features.reserve(M);
  for (int i = 0; i < M; ++i) inst.target_features.push_back(read_vec(is, D));
  inst.theta_star = read_vec(is, D);
  std::string token;
  while (is >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw std::runtime_error("instance file: bad metadata " + token);
    const std::string key = token.substr(0, eq);
    const std::string val = token.substr(eq + 1);
    if (key == "noise") {
      if (val == "gaussian") inst.noise = NoiseKind::Gaussian;
      else if (val == "bernoulli") inst.noise = NoiseKind::Bernoulli;
      else throw std::runtime_error("instance file: unknown noise " + val);
    } else if (key == "sigma") {
      inst.sigma = std::stod(val);
    } else if (key == "dstar") {
      inst.intrinsic_dim = std::stoi(val);
    } else {
      throw std::runtime_error("instance file: unknown key " + key);
    }
  }
  if (inst.target_features.empty()) inst.target_features = inst.action_features;
  inst.validate();
  return inst;
}

double ContextualInstance::sample_reward(int ctx, int action, Rng& rng) const {
  const double mean = mean_reward(ctx, action);
  if (noise == NoiseKind::Bernoulli) {
    if (mean < 0.0 || mean > 1.0)
      throw std::invalid_argument("ContextualInstance: bernoulli mean outside [0,1]");
    return rng.bernoulli(mean) ? 1.0 : 0.0;
  }
  return mean + sigma * rng.normal();
}

double ContextualInstance::sample_loss(int ctx, int action, Rng& rng) const {
  return 1.0 - sample_reward(ctx, action, rng);
}

}  // namespace banditlab
