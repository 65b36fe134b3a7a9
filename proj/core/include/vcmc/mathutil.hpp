#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace vcmc {

inline constexpr double kLog2Pi = 1.8378770664093454836;

/// Standard normal density.
inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x - 0.5 * kLog2Pi);
}

/// Standard normal CDF via erfc; accurate over the full double range.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

/// log Phi(x), switching to the asymptotic tail expansion where erfc underflows.
double log_normal_cdf(double x);

/// Inverse standard normal CDF (Acklam's rational approximation plus one
/// Halley refinement; relative error < 1e-14 away from the extreme tails).
double normal_quantile(double p);

/// log(sum(exp(v))) with the usual max shift.
double log_sum_exp(std::span<const double> v);

/// Multivariate log-gamma log Gamma_d(a).
double multivariate_lgamma(int d, double a);

/// Type-7 (linear interpolation) quantile of an unsorted copy of `v`; p in [0,1].
double quantile_type7(std::vector<double> v, double p);

}  // namespace vcmc
