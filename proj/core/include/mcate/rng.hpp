#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mcate {

// Quantile function of the standard normal distribution. Wichura's AS241
// (PPND16) rational approximation, absolute error below 1e-9 over (0, 1).
double normal_quantile(double p);

// Standard normal CDF, evaluated through erfc for full-range accuracy.
double normal_cdf(double x);

// Deterministic random stream. std::mt19937_64 is fully specified by the
// standard; the derived draws below avoid the implementation-defined
// std::*_distribution classes, so a seed yields the same sequence everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1), safe as a quantile argument.
  double uniform01_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform integer in [0, n), multiply-shift, no modulo bias.
  int uniform_int(int n);

  double normal() { return normal_quantile(uniform01_open()); }
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Standard normal conditioned on the quantile band [q_lo, q_hi) of its own
  // distribution, sampled by inverse CDF. No rejection loop, one draw each.
  double truncated_normal_quantile_band(double q_lo, double q_hi) {
    return normal_quantile(q_lo + (q_hi - q_lo) * uniform01_open());
  }

  // Index draw from a discrete distribution given by nonnegative weights.
  int categorical(const std::vector<double>& probs);

 private:
  std::mt19937_64 gen_;
};

}  // namespace mcate
