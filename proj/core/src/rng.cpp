#include "vcmc/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "vcmc/mathutil.hpp"

namespace vcmc {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x51'7C'C1'B7'27'22'0A'95ULL));
}

std::uint64_t RandomEngine::uniform_below(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("uniform_below: n must be positive");
  }
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double RandomEngine::normal() {
  const double u1 = uniform_pos();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double RandomEngine::gamma(double shape) {
  if (shape <= 0.0) {
    throw std::invalid_argument("gamma: shape must be positive");
  }
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform_pos(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

double RandomEngine::truncated_std_normal_lower(double lower) {
  if (lower <= 5.0) {
    // Work with the upper-tail mass so the transform stays accurate when the
    // retained region is small; u strictly interior keeps z strictly above
    // the bound.
    const double upper_mass = normal_cdf(-lower);
    const double u = uniform_open();
    return -normal_quantile(upper_mass * u);
  }
  // Robert's exponential-proposal rejection for the deep tail.
  const double alpha = 0.5 * (lower + std::sqrt(lower * lower + 4.0));
  for (;;) {
    const double z = lower - std::log(uniform_pos()) / alpha;
    const double diff = z - alpha;
    if (std::log(uniform_pos()) <= -0.5 * diff * diff) {
      return z;
    }
  }
}

double RandomEngine::truncated_normal_sign(double mean, bool positive) {
  // Reduce both cases to a standard normal truncated below at -|"signed" mean|.
  if (positive) {
    return mean + truncated_std_normal_lower(-mean);
  }
  return mean - truncated_std_normal_lower(mean);
}

}  // namespace vcmc
