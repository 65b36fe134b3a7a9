#pragma once

#include <cstdint>
#include <random>

namespace vcmc {

/// 64-bit finalizer used for seed derivation. Stable across platforms, so a
/// (master seed, partition index) pair always maps to the same stream.
std::uint64_t mix64(std::uint64_t x);

/// Per-partition seed: hash of the master seed and the partition index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Random engine with explicit conversions. mt19937_64 output is pinned by the
/// standard, and all variate transforms live here, so any two runs with the
/// same seed produce bit-identical draws regardless of platform or thread
/// count.
class RandomEngine {
 public:
  explicit RandomEngine(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Uniform integer in [0, n) by rejection (unbiased).
  std::uint64_t uniform_below(std::uint64_t n);

  /// Standard normal via Box-Muller (no cached second value).
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Gamma(shape, 1) via Marsaglia-Tsang, with the boost u^(1/a) trick for
  /// shape < 1.
  double gamma(double shape);

  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

  /// Standard normal truncated to (lower, +inf). Inverse-CDF when the bound is
  /// moderate, exponential-proposal rejection in the deep tail.
  double truncated_std_normal_lower(double lower);

  /// N(mean, 1) truncated to (0, +inf) when positive==true, else (-inf, 0].
  double truncated_normal_sign(double mean, bool positive);

 private:
  std::mt19937_64 engine_;
};

}  // namespace vcmc
