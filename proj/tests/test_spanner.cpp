#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "banditlab/spanner.hpp"

using namespace banditlab;
using namespace banditlab::spanner;

namespace {

std::vector<Vec> standard_basis(int d) {
  std::vector<Vec> out;
  for (int i = 0; i < d; ++i) {
    Vec v = Vec::Zero(d);
    v[i] = 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vec> random_unit_ball(int d, int K, Rng& rng) {
  std::vector<Vec> out;
  out.reserve(K);
  for (int a = 0; a < K; ++a) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    v *= std::pow(rng.uniform(), 1.0 / d) / std::max(v.norm(), 1e-12);
    out.push_back(std::move(v));
  }
  // Mix in a scaled basis so the set always spans.
  for (int i = 0; i < d; ++i) {
    Vec v = Vec::Zero(d);
    v[i] = 0.3;
    out.push_back(std::move(v));
  }
  return out;
}

// Independent certificate: solve the basis system per action with a fresh
// factorization and check the coefficients.
double certificate_by_solve(const std::vector<int>& members,
                            const std::vector<Vec>& embeddings,
                            const ReweightParams* params) {
  const int d = static_cast<int>(embeddings[0].size());
  Mat basis(d, d);
  for (int i = 0; i < d; ++i)
    basis.col(i) = params ? params->reweighted(embeddings, members[i])
                          : embeddings[members[i]];
  Eigen::PartialPivLU<Mat> lu(basis);
  double worst = 0.0;
  for (std::size_t a = 0; a < embeddings.size(); ++a) {
    const Vec phi = params ? params->reweighted(embeddings, static_cast<int>(a))
                           : embeddings[a];
    worst = std::max(worst, lu.solve(phi).cwiseAbs().maxCoeff());
  }
  return worst;
}

double brute_force_max_det(const std::vector<Vec>& embeddings, int d) {
  const int K = static_cast<int>(embeddings.size());
  std::vector<int> idx(d);
  double best = 0.0;
  // Enumerate d-subsets (d <= 4 in tests).
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == d) {
      Mat m(d, d);
      for (int i = 0; i < d; ++i) m.col(i) = embeddings[idx[i]];
      best = std::max(best, std::abs(m.determinant()));
      return;
    }
    for (int a = start; a < K; ++a) {
      idx[depth] = a;
      rec(a + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST_CASE("barycentric_spanner on the standard basis") {
  auto embeddings = standard_basis(3);
  auto s = barycentric_spanner(embeddings, 2.0, make_exhaustive_oracle(embeddings));
  CHECK(std::abs(std::abs(s.det) - 1.0) < 1e-12);
  std::vector<bool> seen(3, false);
  for (int m : s.members) seen[m] = true;
  CHECK((seen[0] && seen[1] && seen[2]));
}

TEST_CASE("barycentric_spanner picks the long vector") {
  Vec e1 = Vec::Zero(2), e2 = Vec::Zero(2), big(2);
  e1[0] = 1.0;
  e2[1] = 1.0;
  big[0] = 10.0;
  big[1] = 10.0;
  std::vector<Vec> embeddings = {e1, e2, big};
  auto s = barycentric_spanner(embeddings, 2.0, make_exhaustive_oracle(embeddings));
  bool has_big = false;
  for (int m : s.members) has_big |= (m == 2);
  CHECK(has_big);
  // Exhaustive determinant search agrees the returned det is near-maximal.
  CHECK(std::abs(s.det) >= brute_force_max_det(embeddings, 2) / 2.0);
}

TEST_CASE("barycentric_spanner errors on non-spanning input") {
  Vec e1 = Vec::Zero(2);
  e1[0] = 1.0;
  std::vector<Vec> embeddings = {e1, 2.0 * e1};
  CHECK_THROWS(barycentric_spanner(embeddings, 2.0, make_exhaustive_oracle(embeddings)));
}

TEST_CASE("spanner certificate and swap accounting on random instances") {
  Rng rng(101);
  const double C = 2.0;
  for (int d = 2; d <= 8; ++d) {
    for (int rep = 0; rep < 12; ++rep) {
      auto embeddings = random_unit_ball(d, 4 * d + 10, rng);
      auto s = barycentric_spanner(embeddings, C, make_exhaustive_oracle(embeddings));
      CHECK(certificate_by_solve(s.members, embeddings, nullptr) <= C + 1e-6);
      // Rank-one maintained det/inverse vs full recomputation.
      Mat basis(d, d);
      for (int i = 0; i < d; ++i) basis.col(i) = embeddings[s.members[i]];
      const double fresh_det = basis.determinant();
      CHECK(std::abs(fresh_det - s.det) <= 1e-6 * std::max(1.0, std::abs(fresh_det)));
      CHECK((s.basis_inv * basis - Mat::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-8);
      // Accepted swaps each grew the determinant by at least C.
      if (s.swap_count > 0) CHECK(s.min_swap_ratio >= C - 1e-9);
      const int bound = static_cast<int>(
          std::ceil(d * std::log(static_cast<double>(d)) / std::log(C) + d));
      CHECK(s.swap_count <= bound);
    }
  }
}

TEST_CASE("init_spanner_set determinant scaling") {
  auto basis = standard_basis(3);
  auto [s1, r1] = init_spanner_set(basis);
  CHECK(r1 == doctest::Approx(1.0));
  for (auto& v : basis) v *= 0.5;
  auto [s2, r2] = init_spanner_set(basis);
  CHECK(r2 == doctest::Approx(0.5));
}

TEST_CASE("init_spanner_set achieves the (8d)^-d determinant guarantee") {
  Rng rng(202);
  for (int d = 2; d <= 4; ++d) {
    for (int rep = 0; rep < 10; ++rep) {
      auto embeddings = random_unit_ball(d, 12, rng);
      auto [s, r] = init_spanner_set(embeddings);
      const double best = brute_force_max_det(embeddings, d);
      CHECK(std::abs(s.det) >= best / std::pow(8.0 * d, d) - 1e-12);
      CHECK(r == doctest::Approx(std::pow(std::abs(s.det), 1.0 / d)));
    }
  }
}

TEST_CASE("igw_argmax grid size formula") {
  // d=2, eta=4, r=0.5: N = ceil(2 log_{4/3} 18) = 21 magnitudes per sign.
  const double N = std::ceil(2.0 * std::log((2.0 * 4.0 + 1.0) / 0.5) / std::log(4.0 / 3.0));
  CHECK(N == doctest::Approx(21.0));
}

TEST_CASE("igw_argmax matches plain argmax as eta vanishes") {
  Rng rng(303);
  for (int rep = 0; rep < 30; ++rep) {
    const int d = 2 + rng.index(4);
    auto embeddings = random_unit_ball(d, 30, rng);
    const auto oracle = make_exhaustive_oracle(embeddings);
    ReweightParams params;
    params.eta = 1e-12;
    params.ghat = Vec::Zero(d);
    params.ahat = 0;
    auto [s, r] = init_spanner_set(embeddings);
    params.r_init = std::min(0.9, r);
    Vec theta(d);
    for (int i = 0; i < d; ++i) theta[i] = rng.normal();
    // Scale so the max |<phi, theta>| is inside [r^d, 1].
    double best = 0.0;
    for (const auto& phi : embeddings) best = std::max(best, std::abs(phi.dot(theta)));
    theta *= 0.9 / best;
    const int got = igw_argmax(theta, embeddings, params, oracle);
    double brute = 0.0;
    int want = 0;
    for (std::size_t a = 0; a < embeddings.size(); ++a) {
      const double v = embeddings[a].dot(theta);
      if (v * v > brute) {
        brute = v * v;
        want = static_cast<int>(a);
      }
    }
    const double got_val = std::pow(embeddings[got].dot(theta), 2);
    CHECK(got_val >= 0.5 * brute);  // half-optimality always
    // With vanishing reweighting the argmax value matches brute force.
    CHECK(got_val == doctest::Approx(std::pow(embeddings[want].dot(theta), 2)).epsilon(1e-6));
  }
}

TEST_CASE("igw_argmax half-optimality under reweighting") {
  Rng rng(404);
  for (int rep = 0; rep < 60; ++rep) {
    const int d = 2 + rng.index(5);  // up to 6
    auto embeddings = random_unit_ball(d, 20 + rng.index(60), rng);
    const auto oracle = make_exhaustive_oracle(embeddings);
    Vec ghat(d);
    for (int i = 0; i < d; ++i) ghat[i] = rng.normal();
    ghat /= std::max(1.0, ghat.norm());
    ReweightParams params;
    params.eta = rng.uniform(0.1, 8.0);
    params.ghat = ghat;
    params.ahat = oracle(ghat);
    auto [s, r] = init_spanner_set(embeddings);
    params.r_init = std::min(0.9, r);

    Vec theta(d);
    for (int i = 0; i < d; ++i) theta[i] = rng.normal();
    double zeta = 0.0;
    for (std::size_t a = 0; a < embeddings.size(); ++a)
      zeta = std::max(zeta,
                      std::abs(params.reweighted(embeddings, static_cast<int>(a)).dot(theta)));
    // Make the precondition r^d <= zeta <= 1 hold by rescaling theta.
    const double target = rng.uniform(std::pow(params.r_init, d), 1.0);
    theta *= target / zeta;

    double brute = 0.0;
    for (std::size_t a = 0; a < embeddings.size(); ++a) {
      const double v = params.reweighted(embeddings, static_cast<int>(a)).dot(theta);
      brute = std::max(brute, v * v);
    }
    const int got = igw_argmax(theta, embeddings, params, oracle);
    const double got_val =
        std::pow(params.reweighted(embeddings, got).dot(theta), 2);
    CHECK(got_val >= 0.5 * brute - 1e-12);
  }
}

TEST_CASE("reweighted_spanner degenerate reweighting matches the plain spanner") {
  Rng rng(505);
  auto embeddings = random_unit_ball(3, 20, rng);
  const auto oracle = make_exhaustive_oracle(embeddings);
  auto [init, r] = init_spanner_set(embeddings);
  ReweightParams params;
  params.eta = 0.0;
  params.ghat = Vec::Zero(3);
  params.ahat = 0;
  params.r_init = std::min(0.9, r);
  auto s = reweighted_spanner(embeddings, params, 2.0, init.members, oracle);
  CHECK(certificate_by_solve(s.members, embeddings, nullptr) <= 2.0 + 1e-6);
}

TEST_CASE("reweighted_spanner certificate and swap growth on random instances") {
  Rng rng(606);
  const double C = 2.0;
  for (int d = 2; d <= 8; ++d) {
    for (int rep = 0; rep < 8; ++rep) {
      auto embeddings = random_unit_ball(d, 3 * d + 8, rng);
      const auto oracle = make_exhaustive_oracle(embeddings);
      Vec ghat(d);
      for (int i = 0; i < d; ++i) ghat[i] = rng.normal();
      ghat /= std::max(1.0, ghat.norm());
      auto [init, r] = init_spanner_set(embeddings);
      ReweightParams params;
      params.eta = rng.uniform(0.5, 6.0);
      params.ghat = ghat;
      params.ahat = oracle(ghat);
      params.r_init = std::min(0.9, r);
      auto s = reweighted_spanner(embeddings, params, C, init.members, oracle);
      CHECK(certificate_by_solve(s.members, embeddings, &params) <= C + 1e-6);
      if (s.swap_count > 0)
        CHECK(s.min_swap_ratio >= std::sqrt(2.0) * C / 2.0 - 1e-9);
      const int bound = static_cast<int>(std::ceil(
          8.0 * d * std::log(std::max(std::exp(1.0), params.eta / params.r_init))));
      CHECK(s.swap_count <= bound);
      // Rank-one state matches a fresh factorization.
      Mat basis(d, d);
      for (int i = 0; i < d; ++i)
        basis.col(i) = params.reweighted(embeddings, s.members[i]);
      CHECK(std::abs(basis.determinant() - s.det) <=
            1e-6 * std::max(1.0, std::abs(basis.determinant())));
    }
  }
}

TEST_CASE("spanner_to_design worked examples and design bound") {
  auto basis = standard_basis(3);
  auto s = barycentric_spanner(basis, 2.0, make_exhaustive_oracle(basis));
  auto q = spanner_to_design(s);
  CHECK(q.support.size() == 3);
  for (double w : q.weights) CHECK(w == doctest::Approx(1.0 / 3.0));
  // V(q) = I/d: the sup of the quadratic form over the basis equals d.
  Mat v = Mat::Zero(3, 3);
  for (std::size_t i = 0; i < q.support.size(); ++i)
    v += q.weights[i] * basis[q.support[i]] * basis[q.support[i]].transpose();
  const Mat vinv = v.inverse();
  double sup = 0.0;
  for (const auto& z : basis) sup = std::max(sup, z.dot(vinv * z));
  CHECK(sup == doctest::Approx(3.0));

  // d=1, single unit action: design value 1.
  Vec one(1);
  one[0] = 1.0;
  std::vector<Vec> single = {one};
  auto s1 = barycentric_spanner(single, 2.0, make_exhaustive_oracle(single));
  auto q1 = spanner_to_design(s1);
  CHECK(q1.weights[0] == doctest::Approx(1.0));

  // Random C=2 spanners obey sup_z ||z||^2_{V(q)^-1} <= C^2 d^2.
  Rng rng(707);
  for (int d = 2; d <= 5; ++d) {
    auto embeddings = random_unit_ball(d, 30, rng);
    auto sx = barycentric_spanner(embeddings, 2.0, make_exhaustive_oracle(embeddings));
    Mat vx = Mat::Zero(d, d);
    for (int m : sx.members)
      vx += (1.0 / d) * embeddings[m] * embeddings[m].transpose();
    const Mat vxi = vx.inverse();
    double supx = 0.0;
    for (const auto& z : embeddings) supx = std::max(supx, z.dot(vxi * z));
    CHECK(supx <= 4.0 * d * d * (1.0 + 1e-6));
  }
}
