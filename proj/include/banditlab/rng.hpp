#pragma once
// Seeded RNG with hand-rolled distributions. std::* distributions are
// implementation-defined, so every draw here is spelled out to keep runs
// bit-identical across toolchains.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace banditlab {

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

  // Independent stream for trial `index` of a run seeded with `seed`.
  static Rng for_trial(std::uint64_t seed, std::uint64_t index) {
    return Rng(seed ^ index);
  }

  std::uint64_t raw() { return gen_(); }

  // Uniform on [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, no caching: two raw draws per variate.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n) without modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n == 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return x % n;
  }

  int index(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  // Categorical draw over (possibly unnormalized) nonnegative weights.
  int categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("Rng::categorical: zero mass");
    double u = uniform() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  // Sum of n iid N(mean, sd^2) draws, realized with a single variate.
  double normal_sum(double mean, double sd, std::int64_t n) {
    if (n <= 0) return 0.0;
    return static_cast<double>(n) * mean + sd * std::sqrt(static_cast<double>(n)) * normal();
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace banditlab
