#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "vcmc/aggregation.hpp"
#include "vcmc/rng.hpp"

namespace vcmc::testing {

/// Random symmetric PSD matrix Q diag(ev) Q^T with eigenvalues in [lo, hi].
inline Eigen::MatrixXd random_psd(int d, RandomEngine& rng, double lo = 0.2, double hi = 3.0) {
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd ev(d);
  for (int i = 0; i < d; ++i) ev[i] = lo + (hi - lo) * rng.uniform();
  return q * ev.asDiagonal() * q.transpose();
}

/// Random feasible weight set: positive entries normalized per coordinate.
inline WeightSet random_weights(int k, int d, RandomEngine& rng,
                                WeightFamily family = WeightFamily::Vector, int L = 1,
                                double floor = 1e-3) {
  WeightSet w = uniform_weights(k, d, family, L);
  for (int l = 0; l < w.L; ++l) {
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd col(k);
      for (int i = 0; i < k; ++i) col[i] = 0.05 + rng.uniform();
      col /= col.sum();
      col = project_to_simplex(col, floor);
      for (int i = 0; i < k; ++i) w.block(i, l)[j] = col[i];
    }
  }
  return w;
}

/// Central finite differences of f over every weight entry, stepping inside
/// the unconstrained block (no simplex renormalization: f must be defined off
/// the simplex, which all batch objectives are).
inline std::vector<Eigen::VectorXd> finite_difference_gradient(
    const WeightSet& at, const std::function<double(const WeightSet&)>& f, double h = 1e-5) {
  std::vector<Eigen::VectorXd> grad(at.blocks.size());
  for (std::size_t b = 0; b < at.blocks.size(); ++b) {
    grad[b] = Eigen::VectorXd::Zero(at.d);
    for (int j = 0; j < at.d; ++j) {
      WeightSet plus = at;
      WeightSet minus = at;
      plus.blocks[b][j] += h;
      minus.blocks[b][j] -= h;
      grad[b][j] = (f(plus) - f(minus)) / (2.0 * h);
    }
  }
  return grad;
}

inline double gradient_rel_error(const std::vector<Eigen::VectorXd>& a,
                                 const std::vector<Eigen::VectorXd>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]).squaredNorm();
    den += b[i].squaredNorm();
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

/// Batch-means Monte Carlo standard error of the chain mean.
inline double batch_means_se(const std::vector<double>& chain, int num_batches = 30) {
  const int n = static_cast<int>(chain.size());
  const int per = n / num_batches;
  std::vector<double> means;
  for (int b = 0; b < num_batches; ++b) {
    double s = 0.0;
    for (int i = b * per; i < (b + 1) * per; ++i) s += chain[i];
    means.push_back(s / per);
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= means.size();
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= (means.size() - 1);
  return std::sqrt(var / means.size());
}

/// Adaptive-ish Simpson quadrature on [a, b] with a fixed fine grid (n even).
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n = 4000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) {
    s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return s * h / 3.0;
}

}  // namespace vcmc::testing
