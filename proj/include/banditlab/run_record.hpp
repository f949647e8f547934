#pragma once
// Per-round traces and the decimated regret curves the harness stores.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace banditlab {

struct RunRecord {
  std::int64_t round = 0;
  int action = -1;
  double reward = 0.0;
  double benchmark = 0.0;   // per-round comparator value
  bool queried = false;
  std::vector<std::pair<std::string, double>> extra;
};

// Accumulates pseudo-regret sum(benchmark - mean_of_chosen) and keeps a
// checkpointed cumulative-regret curve. Single writer per run.
class RegretTrace {
 public:
  explicit RegretTrace(std::int64_t horizon, int checkpoints = 128)
      : horizon_(horizon) {
    if (horizon <= 0) throw std::invalid_argument("RegretTrace: horizon <= 0");
    if (checkpoints < 1) checkpoints = 1;
    const double step = static_cast<double>(horizon) / checkpoints;
    std::int64_t prev = 0;
    for (int i = 1; i <= checkpoints; ++i) {
      auto t = static_cast<std::int64_t>(step * i);
      if (t <= prev) t = prev + 1;
      if (t > horizon) t = horizon;
      if (t > prev) marks_.push_back(t);
      prev = t;
    }
    if (marks_.empty() || marks_.back() != horizon) marks_.push_back(horizon);
  }

  void step(double benchmark, double chosen_mean) {
    ++t_;
    cum_ += benchmark - chosen_mean;
    if (next_mark_ < marks_.size() && t_ == marks_[next_mark_]) {
      curve_.emplace_back(t_, cum_);
      ++next_mark_;
    }
  }

  std::int64_t rounds() const { return t_; }
  double cumulative() const { return cum_; }
  const std::vector<std::pair<std::int64_t, double>>& curve() const { return curve_; }

 private:
  std::int64_t horizon_;
  std::int64_t t_ = 0;
  double cum_ = 0.0;
  std::vector<std::int64_t> marks_;
  std::size_t next_mark_ = 0;
  std::vector<std::pair<std::int64_t, double>> curve_;
};

}  // namespace banditlab
