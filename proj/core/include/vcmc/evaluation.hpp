#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vcmc/types.hpp"

namespace vcmc {

enum class SuiteKind {
  FirstMoments,
  PureSecondMoments,
  MixedSecondMoments,
  Eigenvalues,
  EigenvaluePairs,
  Comembership,
};

std::string suite_kind_name(SuiteKind kind);
SuiteKind suite_kind_from_name(const std::string& name);

/// A generated set of scalar test functions over parameter draws. Vector
/// suites read flattened coordinates; eigenvalue suites read the descending
/// spectrum of Lambda^{-1}; comembership reads pairwise cluster assignments
/// of the test points.
struct TestFunctionSuite {
  SuiteKind kind = SuiteKind::FirstMoments;
  int dim = 0;                  // coordinate count for moment suites, d for eigen suites
  Eigen::MatrixXd test_points;  // comembership only: rows are points
  double sigma2 = 1.0;          // comembership assignment likelihood variance

  int function_count() const;
  std::vector<std::string> function_names() const;
};

/// Monte Carlo averages of every suite function over the draws.
std::vector<double> estimate_expectations(const std::vector<Eigen::VectorXd>& draws,
                                          ParamShape shape, const TestFunctionSuite& suite);

/// |estimate - reference| / |reference|; nullopt flags a near-zero reference
/// (|reference| < 1e-12), which the report counts as excluded.
std::optional<double> relative_error(double estimate, double reference);

/// P[pair of test points shares a cluster] across draws of aligned centers;
/// assignments are responsibility argmaxes under each draw.
Eigen::MatrixXd comembership_matrix(const std::vector<Eigen::VectorXd>& center_draws,
                                    ParamShape shape, const Eigen::MatrixXd& test_points,
                                    double sigma2);

struct EvaluationReport {
  std::string algorithm;  // serial | uniform_cmc | gaussian_cmc | vcmc
  std::string suite;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  int n_functions = 0;
  int n_excluded = 0;

  std::string to_json() const;
};

/// Median and quartiles (type-7 interpolation) over the retained errors.
EvaluationReport summarize(const std::vector<std::optional<double>>& errors,
                           const std::string& algorithm, const std::string& suite);

/// Joint trimming for comembership reporting: keep the fraction of functions
/// whose worst error across all algorithms is smallest; the same retained set
/// applies to every algorithm. Returns retained indices.
std::vector<int> trim_jointly(
    const std::map<std::string, std::vector<std::optional<double>>>& errors_by_algorithm,
    double keep_fraction);

/// Long-form CSV: one row per function (name, estimate, reference, error or
/// "excluded").
std::string errors_to_csv(const std::vector<std::string>& names,
                          const std::vector<double>& estimates,
                          const std::vector<double>& references,
                          const std::vector<std::optional<double>>& errors);

}  // namespace vcmc
