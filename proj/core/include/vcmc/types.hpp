#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace vcmc {

/// Shape of one parameter draw. Draws are stored flattened row-major, so a
/// mixture draw keeps one cluster center per row.
struct ParamShape {
  int rows = 1;
  int cols = 1;

  int size() const { return rows * cols; }
  bool operator==(const ParamShape&) const = default;
};

inline Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v(m.size());
  for (int i = 0; i < m.rows(); ++i) {
    v.segment(i * m.cols(), m.cols()) = m.row(i);
  }
  return v;
}

inline Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, ParamShape shape) {
  if (v.size() != shape.size()) {
    throw std::invalid_argument("unflatten: size mismatch");
  }
  Eigen::MatrixXd m(shape.rows, shape.cols);
  for (int i = 0; i < shape.rows; ++i) {
    m.row(i) = v.segment(i * shape.cols, shape.cols);
  }
  return m;
}

/// How a partition-level target treats the prior: subposteriors raise it to
/// the power 1/K, partial posteriors keep it whole.
struct TemperingMode {
  enum class Kind { Subposterior, PartialPosterior };

  Kind kind = Kind::Subposterior;
  int num_partitions = 1;

  static TemperingMode subposterior(int k) {
    if (k < 1) throw std::invalid_argument("TemperingMode: K must be >= 1");
    return TemperingMode{Kind::Subposterior, k};
  }
  static TemperingMode partial_posterior() {
    return TemperingMode{Kind::PartialPosterior, 1};
  }

  double prior_exponent() const {
    return kind == Kind::Subposterior ? 1.0 / num_partitions : 1.0;
  }
  bool operator==(const TemperingMode&) const = default;
};

}  // namespace vcmc
