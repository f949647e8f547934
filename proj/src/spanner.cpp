#include "banditlab/spanner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace banditlab::spanner {

namespace {

constexpr double kPivotFloor = 1e-10;
constexpr int kRefreshEvery = 32;

// d x d basis with determinant and inverse maintained under column swaps.
class BasisState {
 public:
  explicit BasisState(int d)
      : basis_(Mat::Identity(d, d)), inv_(Mat::Identity(d, d)), det_(1.0) {}

  int dim() const { return static_cast<int>(basis_.rows()); }
  const Mat& basis() const { return basis_; }
  const Mat& inv() const { return inv_; }
  double det() const { return det_; }

  // Linear functional theta with <y, theta> = det(basis with column i := y).
  Vec swap_functional(int i) const { return det_ * inv_.row(i).transpose(); }

  // Replaces column i by y. new_det = <y, swap_functional(i)> must be nonzero.
  void swap_column(int i, const Vec& y, double new_det) {
    if (std::abs(new_det) < kPivotFloor)
      throw std::runtime_error("spanner: near-singular basis update");
    // Sherman-Morrison for (B + (y - b_i) e_i^T)^{-1}.
    const Vec u = inv_ * (y - basis_.col(i));
    const double denom = 1.0 + u[i];
    inv_ -= (u / denom) * inv_.row(i);
    basis_.col(i) = y;
    det_ = new_det;
    if (++since_refresh_ >= kRefreshEvery) refresh();
  }

  void set_columns(const Mat& cols) {
    basis_ = cols;
    since_refresh_ = 0;
    Eigen::PartialPivLU<Mat> lu(basis_);
    det_ = lu.determinant();
    if (std::abs(det_) < kPivotFloor)
      throw std::runtime_error("spanner: singular initialization");
    inv_ = lu.inverse();
  }

  void refresh() {
    since_refresh_ = 0;
    Eigen::PartialPivLU<Mat> lu(basis_);
    const double det = lu.determinant();
    if (std::abs(det) < kPivotFloor)
      throw std::runtime_error("spanner: basis drifted to singularity");
    det_ = det;
    inv_ = lu.inverse();
  }

 private:
  Mat basis_;
  Mat inv_;
  double det_;
  int since_refresh_ = 0;
};

// Signed argmax of |<phi(a), theta>| via two oracle calls; ties prefer the
// lower action index.
int abs_argmax(const LinOptOracle& oracle, const std::vector<Vec>& embeddings,
               const Vec& theta, double* value) {
  const int ap = oracle(theta);
  const int am = oracle(-theta);
  const double vp = std::abs(embeddings[ap].dot(theta));
  const double vm = std::abs(embeddings[am].dot(theta));
  int a;
  if (vp > vm) a = ap;
  else if (vm > vp) a = am;
  else a = std::min(ap, am);
  if (value) *value = embeddings[a].dot(theta);
  return a;
}

SpannerSet finish(const BasisState& state, std::vector<int> members, int swaps,
                  int reinits, double min_ratio) {
  SpannerSet s;
  s.members = std::move(members);
  s.basis = state.basis();
  s.basis_inv = state.inv();
  s.det = state.det();
  s.swap_count = swaps;
  s.reinit_count = reinits;
  s.min_swap_ratio = min_ratio;
  return s;
}

}  // namespace

LinOptOracle make_exhaustive_oracle(const std::vector<Vec>& embeddings) {
  const std::vector<Vec>* embs = &embeddings;
  return [embs](const Vec& theta) {
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < embs->size(); ++a) {
      const double v = (*embs)[a].dot(theta);
      if (v > best_val) {
        best_val = v;
        best = static_cast<int>(a);
      }
    }
    return best;
  };
}

SpannerSet barycentric_spanner(const std::vector<Vec>& embeddings, double C,
                               const LinOptOracle& oracle) {
  if (embeddings.empty()) throw std::invalid_argument("barycentric_spanner: no embeddings");
  if (!(C > 1.0)) throw std::invalid_argument("barycentric_spanner: C <= 1");
  const int d = static_cast<int>(embeddings[0].size());
  BasisState state(d);
  std::vector<int> members(d, -1);

  // Build a basis contained in the action set, one column at a time.
  for (int i = 0; i < d; ++i) {
    const Vec theta = state.swap_functional(i);
    double val = 0.0;
    const int a = abs_argmax(oracle, embeddings, theta, &val);
    if (std::abs(val) < kPivotFloor)
      throw std::runtime_error("barycentric_spanner: embeddings do not span R^d");
    state.swap_column(i, embeddings[a], val);
    members[i] = a;
  }

  // Swap phase: replace a column whenever it grows |det| by a factor >= C.
  const int max_swaps =
      4 * static_cast<int>(std::ceil(d * std::log(static_cast<double>(d) + 1.0) /
                                         std::log(C) +
                                     d + 1));
  int swaps = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < d; ++i) {
      const Vec theta = state.swap_functional(i);
      double val = 0.0;
      const int a = abs_argmax(oracle, embeddings, theta, &val);
      if (std::abs(val) >= C * std::abs(state.det())) {
        const double ratio = std::abs(val) / std::abs(state.det());
        min_ratio = std::min(min_ratio, ratio);
        state.swap_column(i, embeddings[a], val);
        members[i] = a;
        if (++swaps > max_swaps)
          throw std::runtime_error("barycentric_spanner: swap budget exceeded");
        improved = true;
        break;
      }
    }
  }
  return finish(state, std::move(members), swaps, 0,
                swaps ? min_ratio : 0.0);
}

std::pair<SpannerSet, double> init_spanner_set(const std::vector<Vec>& embeddings) {
  SpannerSet s = barycentric_spanner(embeddings, 2.0, make_exhaustive_oracle(embeddings));
  const double r = std::pow(std::abs(s.det), 1.0 / s.dim());
  return {std::move(s), r};
}

int igw_argmax(const Vec& theta, const std::vector<Vec>& embeddings,
               const ReweightParams& params, const LinOptOracle& oracle) {
  if (embeddings.empty()) throw std::invalid_argument("igw_argmax: empty action set");
  const int d = static_cast<int>(theta.size());
  const double r = params.r_init;
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("igw_argmax: r outside (0,1)");
  const double top = params.offset + 2.0 * params.eta + 1.0;
  const int N = static_cast<int>(
      std::ceil(d * std::log(top / r) / std::log(4.0 / 3.0)));

  int best = -1;
  double best_iota = -std::numeric_limits<double>::infinity();
  auto consider = [&](int a) {
    const double v = params.reweighted(embeddings, a).dot(theta);
    const double iota = v * v;
    if (iota > best_iota || (iota == best_iota && a < best)) {
      best_iota = iota;
      best = a;
    }
  };
  double eps = 1.0;
  for (int i = 1; i <= N; ++i) {
    eps *= 0.75;
    for (const double sign : {1.0, -1.0}) {
      const double e = sign * eps;
      const Vec theta_bar = 2.0 * e * theta + e * e * params.eta * params.ghat;
      consider(oracle(theta_bar));
    }
  }
  return best;
}

SpannerSet reweighted_spanner(const std::vector<Vec>& embeddings,
                              const ReweightParams& params, double C,
                              const std::vector<int>& init_members,
                              const LinOptOracle& oracle) {
  if (!(C > std::sqrt(2.0)))
    throw std::invalid_argument("reweighted_spanner: C <= sqrt(2)");
  const int d = static_cast<int>(embeddings[0].size());
  if (static_cast<int>(init_members.size()) != d)
    throw std::invalid_argument("reweighted_spanner: bad init set size");

  BasisState state(d);
  std::vector<int> members = init_members;
  auto rebuild = [&]() {
    Mat cols(d, d);
    for (int i = 0; i < d; ++i) cols.col(i) = params.reweighted(embeddings, members[i]);
    state.set_columns(cols);
  };
  rebuild();

  const double r = params.r_init;
  // Reweighting shrinks norms by at most sqrt(1 + offset + 2 eta), so the
  // initial reweighted determinant is at least r_bar^d.
  const double r_bar = r / std::sqrt(1.0 + params.offset + 2.0 * params.eta);
  const double det_floor = std::pow(r_bar, d) * (1.0 - 1e-9);
  const double accept = std::sqrt(2.0) * C / 2.0;
  const int max_swaps = 4 * static_cast<int>(std::ceil(
                                8.0 * d * std::log(std::max(std::exp(1.0), params.eta / r)) +
                                d + 1));

  int swaps = 0, reinits = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  bool improved = true;
  while (improved) {
    improved = false;
    if (std::abs(state.det()) < det_floor) {
      // Numerical drift broke the invariant the grid search relies on; restart
      // from a fresh raw-embedding spanner and keep going.
      members = init_spanner_set(embeddings).first.members;
      rebuild();
      ++reinits;
    }
    for (int i = 0; i < d; ++i) {
      const Vec theta = state.swap_functional(i);
      const int a = igw_argmax(theta, embeddings, params, oracle);
      const Vec cand = params.reweighted(embeddings, a);
      const double val = cand.dot(theta);
      if (std::abs(val) >= accept * std::abs(state.det())) {
        const double ratio = std::abs(val) / std::abs(state.det());
        min_ratio = std::min(min_ratio, ratio);
        state.swap_column(i, cand, val);
        members[i] = a;
        if (++swaps > max_swaps)
          throw std::runtime_error("reweighted_spanner: swap budget exceeded");
        improved = true;
        break;
      }
    }
  }
  return finish(state, std::move(members), swaps, reinits,
                swaps ? min_ratio : 0.0);
}

ActionDistribution spanner_to_design(const SpannerSet& s) {
  return ActionDistribution::uniform(s.members);
}

double certificate(const SpannerSet& s, const std::vector<Vec>& embeddings,
                   const ReweightParams* params) {
  double worst = 0.0;
  for (std::size_t a = 0; a < embeddings.size(); ++a) {
    const Vec phi = params ? params->reweighted(embeddings, static_cast<int>(a))
                           : embeddings[a];
    worst = std::max(worst, (s.basis_inv * phi).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace banditlab::spanner
