#include "vcmc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vcmc/aggregation.hpp"
#include "vcmc/mathutil.hpp"

namespace vcmc {

using nlohmann::json;

std::string suite_kind_name(SuiteKind kind) {
  switch (kind) {
    case SuiteKind::FirstMoments: return "first_moments";
    case SuiteKind::PureSecondMoments: return "pure_second_moments";
    case SuiteKind::MixedSecondMoments: return "mixed_second_moments";
    case SuiteKind::Eigenvalues: return "eigenvalues";
    case SuiteKind::EigenvaluePairs: return "eigenvalue_pairs";
    case SuiteKind::Comembership: return "comembership";
  }
  throw std::logic_error("unknown suite kind");
}

SuiteKind suite_kind_from_name(const std::string& name) {
  if (name == "first_moments") return SuiteKind::FirstMoments;
  if (name == "pure_second_moments") return SuiteKind::PureSecondMoments;
  if (name == "mixed_second_moments") return SuiteKind::MixedSecondMoments;
  if (name == "eigenvalues") return SuiteKind::Eigenvalues;
  if (name == "eigenvalue_pairs") return SuiteKind::EigenvaluePairs;
  if (name == "comembership") return SuiteKind::Comembership;
  throw std::invalid_argument("unknown suite kind: " + name);
}

int TestFunctionSuite::function_count() const {
  switch (kind) {
    case SuiteKind::FirstMoments:
    case SuiteKind::PureSecondMoments:
    case SuiteKind::Eigenvalues:
      return dim;
    case SuiteKind::MixedSecondMoments:
    case SuiteKind::EigenvaluePairs:
      return dim * (dim - 1) / 2;
    case SuiteKind::Comembership: {
      const int n = static_cast<int>(test_points.rows());
      return n * (n - 1) / 2;
    }
  }
  throw std::logic_error("unknown suite kind");
}

std::vector<std::string> TestFunctionSuite::function_names() const {
  std::vector<std::string> names;
  names.reserve(function_count());
  char buf[64];
  switch (kind) {
    case SuiteKind::FirstMoments:
      for (int j = 0; j < dim; ++j) {
        std::snprintf(buf, sizeof(buf), "theta[%d]", j);
        names.emplace_back(buf);
      }
      break;
    case SuiteKind::PureSecondMoments:
      for (int j = 0; j < dim; ++j) {
        std::snprintf(buf, sizeof(buf), "theta[%d]^2", j);
        names.emplace_back(buf);
      }
      break;
    case SuiteKind::MixedSecondMoments:
      for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j) {
          std::snprintf(buf, sizeof(buf), "theta[%d]*theta[%d]", i, j);
          names.emplace_back(buf);
        }
      }
      break;
    case SuiteKind::Eigenvalues:
      for (int j = 0; j < dim; ++j) {
        std::snprintf(buf, sizeof(buf), "rho[%d]", j);
        names.emplace_back(buf);
      }
      break;
    case SuiteKind::EigenvaluePairs:
      for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j) {
          std::snprintf(buf, sizeof(buf), "rho[%d]*rho[%d]", i, j);
          names.emplace_back(buf);
        }
      }
      break;
    case SuiteKind::Comembership: {
      const int n = static_cast<int>(test_points.rows());
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          std::snprintf(buf, sizeof(buf), "comember(%d,%d)", i, j);
          names.emplace_back(buf);
        }
      }
      break;
    }
  }
  return names;
}

namespace {

// Descending eigenvalues of Lambda^{-1} given a draw of Lambda.
Eigen::VectorXd inverse_spectrum(const Eigen::VectorXd& flat, ParamShape shape) {
  const auto eig = canonical_eigendecomposition(unflatten(flat, shape));
  Eigen::VectorXd rho(eig.values.size());
  for (int i = 0; i < rho.size(); ++i) {
    rho[i] = 1.0 / eig.values[eig.values.size() - 1 - i];  // reverse descending Lambda order
  }
  return rho;
}

std::vector<int> assign_points(const Eigen::MatrixXd& centers, const Eigen::MatrixXd& points,
                               double sigma2) {
  std::vector<int> assignment(points.rows());
  for (int i = 0; i < points.rows(); ++i) {
    // argmax responsibility with uniform mixture weights = closest center,
    // written as responsibilities to keep the definition explicit
    int best = 0;
    double best_logit = -0.5 * (points.row(i) - centers.row(0)).squaredNorm() / sigma2;
    for (int l = 1; l < centers.rows(); ++l) {
      const double logit = -0.5 * (points.row(i) - centers.row(l)).squaredNorm() / sigma2;
      if (logit > best_logit) {
        best_logit = logit;
        best = l;
      }
    }
    assignment[i] = best;
  }
  return assignment;
}

}  // namespace

std::vector<double> estimate_expectations(const std::vector<Eigen::VectorXd>& draws,
                                          ParamShape shape, const TestFunctionSuite& suite) {
  if (draws.empty()) throw std::invalid_argument("estimate_expectations: no draws");
  const double t = static_cast<double>(draws.size());
  std::vector<double> out(suite.function_count(), 0.0);

  switch (suite.kind) {
    case SuiteKind::FirstMoments: {
      if (shape.size() != suite.dim) throw std::invalid_argument("suite/shape mismatch");
      for (const auto& v : draws) {
        for (int j = 0; j < suite.dim; ++j) out[j] += v[j];
      }
      break;
    }
    case SuiteKind::PureSecondMoments: {
      if (shape.size() != suite.dim) throw std::invalid_argument("suite/shape mismatch");
      for (const auto& v : draws) {
        for (int j = 0; j < suite.dim; ++j) out[j] += v[j] * v[j];
      }
      break;
    }
    case SuiteKind::MixedSecondMoments: {
      if (shape.size() != suite.dim) throw std::invalid_argument("suite/shape mismatch");
      for (const auto& v : draws) {
        int f = 0;
        for (int i = 0; i < suite.dim; ++i) {
          for (int j = i + 1; j < suite.dim; ++j) out[f++] += v[i] * v[j];
        }
      }
      break;
    }
    case SuiteKind::Eigenvalues: {
      if (shape.rows != shape.cols || shape.rows != suite.dim) {
        throw std::invalid_argument("eigenvalue suite needs square draws of matching size");
      }
      for (const auto& v : draws) {
        const Eigen::VectorXd rho = inverse_spectrum(v, shape);
        for (int j = 0; j < suite.dim; ++j) out[j] += rho[j];
      }
      break;
    }
    case SuiteKind::EigenvaluePairs: {
      if (shape.rows != shape.cols || shape.rows != suite.dim) {
        throw std::invalid_argument("eigenvalue suite needs square draws of matching size");
      }
      for (const auto& v : draws) {
        const Eigen::VectorXd rho = inverse_spectrum(v, shape);
        int f = 0;
        for (int i = 0; i < suite.dim; ++i) {
          for (int j = i + 1; j < suite.dim; ++j) out[f++] += rho[i] * rho[j];
        }
      }
      break;
    }
    case SuiteKind::Comembership: {
      const Eigen::MatrixXd prob =
          comembership_matrix(draws, shape, suite.test_points, suite.sigma2);
      int f = 0;
      for (int i = 0; i < prob.rows(); ++i) {
        for (int j = i + 1; j < prob.cols(); ++j) out[f++] = prob(i, j);
      }
      return out;  // already an average over draws
    }
  }
  for (double& v : out) v /= t;
  return out;
}

std::optional<double> relative_error(double estimate, double reference) {
  if (std::abs(reference) < 1e-12) {
    return std::nullopt;
  }
  return std::abs(estimate - reference) / std::abs(reference);
}

Eigen::MatrixXd comembership_matrix(const std::vector<Eigen::VectorXd>& center_draws,
                                    ParamShape shape, const Eigen::MatrixXd& test_points,
                                    double sigma2) {
  if (test_points.rows() == 0) {
    throw std::invalid_argument("comembership_matrix: empty test set");
  }
  if (center_draws.empty()) {
    throw std::invalid_argument("comembership_matrix: no draws");
  }
  const int n = static_cast<int>(test_points.rows());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
  for (const auto& flat : center_draws) {
    const Eigen::MatrixXd centers = unflatten(flat, shape);
    const auto assignment = assign_points(centers, test_points, sigma2);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        if (assignment[i] == assignment[j]) {
          counts(i, j) += 1.0;
          counts(j, i) = counts(i, j);
        }
      }
    }
  }
  // Diagonal entries re-set exactly; i == j is comembership by definition.
  Eigen::MatrixXd prob = counts / static_cast<double>(center_draws.size());
  prob.diagonal().setOnes();
  return prob;
}

EvaluationReport summarize(const std::vector<std::optional<double>>& errors,
                           const std::string& algorithm, const std::string& suite) {
  std::vector<double> retained;
  int excluded = 0;
  for (const auto& e : errors) {
    if (e) {
      retained.push_back(*e);
    } else {
      ++excluded;
    }
  }
  if (retained.empty()) {
    throw std::invalid_argument("summarize: every function was excluded");
  }
  EvaluationReport report;
  report.algorithm = algorithm;
  report.suite = suite;
  report.median = quantile_type7(retained, 0.5);
  report.q1 = quantile_type7(retained, 0.25);
  report.q3 = quantile_type7(retained, 0.75);
  report.n_functions = static_cast<int>(retained.size());
  report.n_excluded = excluded;
  return report;
}

std::vector<int> trim_jointly(
    const std::map<std::string, std::vector<std::optional<double>>>& errors_by_algorithm,
    double keep_fraction) {
  if (errors_by_algorithm.empty()) {
    throw std::invalid_argument("trim_jointly: no algorithms");
  }
  const std::size_t n = errors_by_algorithm.begin()->second.size();
  std::vector<std::pair<double, int>> score(n);
  for (std::size_t f = 0; f < n; ++f) {
    double worst = 0.0;
    for (const auto& [algo, errs] : errors_by_algorithm) {
      if (errs.size() != n) throw std::invalid_argument("trim_jointly: ragged error lists");
      // An excluded function counts as poorly estimated for trimming purposes.
      worst = std::max(worst, errs[f] ? *errs[f] : std::numeric_limits<double>::infinity());
    }
    score[f] = {worst, static_cast<int>(f)};
  }
  std::stable_sort(score.begin(), score.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const auto keep = static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(n)));
  std::vector<int> retained;
  for (std::size_t i = 0; i < std::min(keep, n); ++i) retained.push_back(score[i].second);
  std::sort(retained.begin(), retained.end());
  return retained;
}

std::string EvaluationReport::to_json() const {
  json j;
  j["algorithm"] = algorithm;
  j["suite"] = suite;
  j["median"] = median;
  j["q1"] = q1;
  j["q3"] = q3;
  j["n_functions"] = n_functions;
  j["n_excluded"] = n_excluded;
  return j.dump(2);
}

std::string errors_to_csv(const std::vector<std::string>& names,
                          const std::vector<double>& estimates,
                          const std::vector<double>& references,
                          const std::vector<std::optional<double>>& errors) {
  if (names.size() != estimates.size() || names.size() != references.size() ||
      names.size() != errors.size()) {
    throw std::invalid_argument("errors_to_csv: length mismatch");
  }
  std::string out = "function,estimate,reference,error\n";
  char buf[256];
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (errors[i]) {
      std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n", names[i].c_str(), estimates[i],
                    references[i], *errors[i]);
    } else {
      std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,excluded\n", names[i].c_str(),
                    estimates[i], references[i]);
    }
    out += buf;
  }
  return out;
}

}  // namespace vcmc
