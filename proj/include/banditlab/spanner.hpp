#pragma once
// Barycentric spanners over raw and reweighted action embeddings, the
// grid-search argmax for reweighted embeddings, and spanner-to-design
// conversion. Basis determinant and inverse are maintained with rank-one
// updates and refreshed periodically.

#include <functional>
#include <vector>

#include "banditlab/distribution.hpp"
#include "banditlab/instance.hpp"

namespace banditlab::spanner {

// Linear optimization oracle: argmax_a <phi(a), theta> (signed; callers take
// two calls for the absolute value). Ties resolve to the lowest index.
using LinOptOracle = std::function<int(const Vec&)>;

LinOptOracle make_exhaustive_oracle(const std::vector<Vec>& embeddings);

struct SpannerSet {
  std::vector<int> members;   // d action indices, column order
  Mat basis;                  // columns = member embeddings (possibly reweighted)
  Mat basis_inv;
  double det = 0.0;
  int swap_count = 0;
  int reinit_count = 0;
  double min_swap_ratio = 0.0;  // smallest |det_new|/|det_old| over accepted swaps

  int dim() const { return static_cast<int>(members.size()); }
};

// Reweighted embedding: phi(a) / sqrt(1 + offset + eta * gap(a)) with
// gap(a) = <phi(ahat) - phi(a), ghat>. offset = 0 is the exact scheme;
// offset = d gives the practical sampling variant.
struct ReweightParams {
  double eta = 0.0;
  Vec ghat;
  int ahat = 0;
  double r_init = 0.5;
  double offset = 0.0;

  double gap(const std::vector<Vec>& embeddings, int a) const {
    const double g = (embeddings[ahat] - embeddings[a]).dot(ghat);
    return g > 0.0 ? g : 0.0;
  }
  Vec reweighted(const std::vector<Vec>& embeddings, int a) const {
    return embeddings[a] / std::sqrt(1.0 + offset + eta * gap(embeddings, a));
  }
};

// Awerbuch-Kleinberg C-approximate barycentric spanner over the raw
// embeddings. Requires C > 1 and a spanning embedding set.
SpannerSet barycentric_spanner(const std::vector<Vec>& embeddings, double C,
                               const LinOptOracle& oracle);

// C=2 spanner on the raw embeddings plus r = |det|^(1/d).
std::pair<SpannerSet, double> init_spanner_set(const std::vector<Vec>& embeddings);

// Grid-search argmax of <phi_bar(a), theta>^2 using only raw linear
// optimization calls. Guarantees a 1/2-multiplicative approximation whenever
// max_a |<phi_bar(a), theta>| lies in [r_init^d, 1].
int igw_argmax(const Vec& theta, const std::vector<Vec>& embeddings,
               const ReweightParams& params, const LinOptOracle& oracle);

// C-approximate spanner of the reweighted embeddings (C > sqrt(2)), seeded
// with members whose raw determinant is at least r_init^d.
SpannerSet reweighted_spanner(const std::vector<Vec>& embeddings,
                              const ReweightParams& params, double C,
                              const std::vector<int>& init_members,
                              const LinOptOracle& oracle);

// Uniform design over spanner members: a (C^2 d)-approximate optimal design.
ActionDistribution spanner_to_design(const SpannerSet& s);

// max_a ||basis^{-1} phi(a)||_inf over the given embeddings (reweight with
// params first when provided). The spanner certificate value.
double certificate(const SpannerSet& s, const std::vector<Vec>& embeddings,
                   const ReweightParams* params = nullptr);

}  // namespace banditlab::spanner
