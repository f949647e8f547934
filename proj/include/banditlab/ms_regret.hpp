#pragma once
// Regret-minimization model selection: MOSS with virtual mixture-arms,
// MOSS++ / empMOSS++, Parallel with known mu*, LinUCB with the modified
// confidence width, LinUCB++ with virtual dimensions, LinUCB++ with Corral,
// and anytime doubling wrappers.

#include <cstdint>
#include <optional>
#include <vector>

#include "banditlab/instance.hpp"
#include "banditlab/run_record.hpp"

namespace banditlab::ms {

// Virtual mixture-arm: replays a past iteration's empirical action
// frequencies. Component handles: >= 0 real arm index, < 0 mixture arm
// ~handle (levels strictly decrease, keeping the graph acyclic).
struct MixtureArm {
  int level = 0;
  std::vector<std::pair<int, double>> components;
};

inline int mixture_handle(int index) { return -1 - index; }
inline bool is_mixture(int handle) { return handle < 0; }
inline int mixture_index(int handle) { return -1 - handle; }

// Recursive categorical draws until a real arm comes out.
int mixture_sample(const std::vector<MixtureArm>& mixtures, int handle, Rng& rng);

// Exact expected reward of a handle by flattening the mixture graph.
double mixture_mean(const std::vector<MixtureArm>& mixtures, const Instance& inst,
                    int handle);

void validate_mixtures(const std::vector<MixtureArm>& mixtures);

// MOSS++ schedule: p = ceil(log2 T^beta), K_i = 2^(p+2-i), dT_i = min(2^(p+i), T).
struct SchedulePlan {
  int p = 0;
  std::vector<std::int64_t> lengths;
  std::vector<std::int64_t> arm_counts;
};
SchedulePlan mosspp_schedule(std::int64_t T, double beta);

// Per-handle sampling statistics (count, reward sum).
struct ArmStats {
  std::int64_t count = 0;
  double sum = 0.0;
  double mean() const { return count ? sum / count : 0.0; }
};

// Resumable MOSS over a fixed handle set. Index: mean + sqrt((4/s) ln+(T/(n s)))
// after one forced pull of each handle; ties break to the lowest handle
// position. Stats may be seeded (and shared) for the empirical variant.
class MossState {
 public:
  MossState(std::int64_t horizon, std::vector<int> handles,
            std::vector<ArmStats> seeded = {});

  // Pulls `count` rounds; returns realized reward sum. Records pseudo-regret
  // into `trace` when given (benchmark = mu_star of the instance).
  double pull(const Instance& inst, const std::vector<MixtureArm>& mixtures,
              std::int64_t count, Rng& rng, RegretTrace* trace,
              double benchmark);

  std::int64_t pulled() const { return pulled_; }
  const std::vector<int>& handles() const { return handles_; }
  const std::vector<ArmStats>& stats() const { return stats_; }
  std::vector<std::int64_t> pull_counts() const { return pulls_; }

 private:
  double index_of(int pos) const;

  std::int64_t horizon_;
  std::vector<int> handles_;
  std::vector<ArmStats> stats_;
  std::vector<std::int64_t> pulls_;     // pulls made by this run, per position
  std::vector<std::uint32_t> version_;
  std::int64_t pulled_ = 0;
  int forced_ = 0;
  // max-heap of (index value, -position, version): lazy deletion
  std::vector<std::tuple<double, int, std::uint32_t>> heap_;
};

struct RunResult {
  double cum_regret = 0.0;
  std::int64_t rounds = 0;
  std::vector<std::pair<std::int64_t, double>> curve;  // checkpointed cum regret
};

// Plain MOSS on all real arms for T rounds.
RunResult moss_run(const Instance& inst, std::int64_t T, Rng& rng,
                   std::int64_t pull_cap = -1);

enum class MossppVariant { Vanilla, Empirical };

RunResult mosspp_run(const Instance& inst, std::int64_t T, double beta,
                     MossppVariant variant, Rng& rng, std::int64_t pull_cap = -1);

// Parallel: ceil(ln T) MOSS subroutines on random subsets, resumed in blocks
// of ceil(sqrt(T)) on the lowest empirical regret (needs mu*).
RunResult parallel_run(const Instance& inst, std::int64_t T, double mu_star, Rng& rng);

// LinUCB with width (alpha + 2 ln T) * sqrt(a' V^-1 a), alpha =
// 2 sqrt(ln(2TK/delta)), V init = I. Bound to a fixed arm matrix so the
// per-arm means and variances update with rank-one work per round.
class LinUcb {
 public:
  LinUcb(Mat arms /* d x K, columns = arms */, double width_multiplier,
         double ridge = 1.0);
  int choose() const;  // argmax score, lowest index on ties
  void update(int arm, double reward);
  const Vec& estimate() const { return theta_; }
  double score(int arm) const {
    return means_[arm] + width_ * std::sqrt(std::max(vars_[arm], 0.0));
  }

 private:
  Mat arms_;
  Mat vinv_;
  Vec moment_;
  Vec theta_;
  Vec means_;  // arms' theta
  Vec vars_;   // a' V^-1 a per arm
  double width_;
};

double linucb_width_multiplier(std::int64_t T, int K, double delta);

RunResult linucb_run(const Instance& inst, std::int64_t T, double delta, Rng& rng,
                     std::vector<int>* actions = nullptr);

RunResult linucbpp_run(const Instance& inst, std::int64_t T, double beta, Rng& rng,
                       double delta = 0.05, std::int64_t pull_cap = -1);

RunResult linucbpp_corral_run(const Instance& inst, std::int64_t T, double beta,
                              Rng& rng, double delta = 0.05,
                              std::int64_t pull_cap = -1,
                              std::vector<std::int64_t>* base_pulls = nullptr);

// Anytime doubling wrapper: restarts the wrapped fixed-horizon runner with
// horizons 2^0, 2^1, ... until `T_stop` total rounds.
enum class AnytimeAlgo { Mosspp, EmpMosspp, Parallel, LinucbPP };
RunResult anytime_wrap(const Instance& inst, AnytimeAlgo algo, std::int64_t T_stop,
                       double beta_or_mu, Rng& rng);

}  // namespace banditlab::ms
