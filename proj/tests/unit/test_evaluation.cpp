#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "test_util.hpp"
#include "vcmc/evaluation.hpp"
#include "vcmc/mathutil.hpp"
#include "vcmc/partition.hpp"
#include "vcmc/rng.hpp"
#include "vcmc/samplers.hpp"

using namespace vcmc;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("relative error basics") {
  CHECK(*relative_error(1.0, 1.0) == doctest::Approx(0.0));
  CHECK(*relative_error(1.1, 1.0) == doctest::Approx(0.1));
  CHECK_FALSE(relative_error(1.0, 0.0).has_value());
  CHECK_FALSE(relative_error(1.0, 5e-13).has_value());
}

TEST_CASE("relative error is scale-sensitive but sign-insensitive") {
  RandomEngine rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const double r = 0.1 + rng.uniform();
    const double delta = rng.uniform();
    CHECK(*relative_error(-r * (1.0 + delta), -r) == doctest::Approx(delta).epsilon(1e-12));
  }
}

TEST_CASE("suite function counts follow the stated combinatorics") {
  TestFunctionSuite first{SuiteKind::FirstMoments, 5};
  CHECK(first.function_count() == 5);
  CHECK(first.function_names().size() == 5);
  TestFunctionSuite pure{SuiteKind::PureSecondMoments, 5};
  CHECK(pure.function_count() == 5);
  TestFunctionSuite mixed{SuiteKind::MixedSecondMoments, 5};
  CHECK(mixed.function_count() == 10);
  TestFunctionSuite pairs{SuiteKind::EigenvaluePairs, 4};
  CHECK(pairs.function_count() == 6);
  TestFunctionSuite com;
  com.kind = SuiteKind::Comembership;
  com.test_points = Eigen::MatrixXd::Zero(4, 2);
  CHECK(com.function_count() == 6);
}

TEST_CASE("estimate_expectations: constant draws, mixed moments, eigenvalues") {
  // Constant draws reproduce the value exactly.
  TestFunctionSuite first{SuiteKind::FirstMoments, 2};
  const std::vector<Eigen::VectorXd> constant{vec2(0.4, -2.0), vec2(0.4, -2.0)};
  const auto firsts = estimate_expectations(constant, {1, 2}, first);
  CHECK(firsts[0] == doctest::Approx(0.4));
  CHECK(firsts[1] == doctest::Approx(-2.0));

  // Mixed second moment of {(1,1),(3,3)} is (1*1 + 3*3)/2 = 5.
  TestFunctionSuite mixed{SuiteKind::MixedSecondMoments, 2};
  const std::vector<Eigen::VectorXd> two{vec2(1.0, 1.0), vec2(3.0, 3.0)};
  CHECK(estimate_expectations(two, {1, 2}, mixed)[0] == doctest::Approx(5.0));

  // Eigenvalue suite on constant diag(4,1): spectrum of Lambda^{-1} is (1, 1/4).
  TestFunctionSuite eigen{SuiteKind::Eigenvalues, 2};
  Eigen::MatrixXd lam(2, 2);
  lam << 4.0, 0.0, 0.0, 1.0;
  const std::vector<Eigen::VectorXd> mats{flatten(lam)};
  const auto rho = estimate_expectations(mats, {2, 2}, eigen);
  CHECK(rho[0] == doctest::Approx(1.0));
  CHECK(rho[1] == doctest::Approx(0.25));

  TestFunctionSuite pure{SuiteKind::PureSecondMoments, 2};
  const auto seconds = estimate_expectations(two, {1, 2}, pure);
  CHECK(seconds[0] == doctest::Approx(5.0));
}

TEST_CASE("estimate_expectations is invariant to sample order") {
  RandomEngine rng(7);
  std::vector<Eigen::VectorXd> draws;
  for (int i = 0; i < 40; ++i) draws.push_back(vec2(rng.normal(), rng.normal()));
  TestFunctionSuite mixed{SuiteKind::MixedSecondMoments, 2};
  const auto base = estimate_expectations(draws, {1, 2}, mixed);
  std::reverse(draws.begin(), draws.end());
  const auto reversed = estimate_expectations(draws, {1, 2}, mixed);
  CHECK(base[0] == doctest::Approx(reversed[0]).epsilon(1e-12));
}

TEST_CASE("comembership of identical and far-separated points") {
  // Two identical points always share a cluster.
  Eigen::MatrixXd centers(2, 1);
  centers << -10.0, 10.0;
  const std::vector<Eigen::VectorXd> draws{flatten(centers)};
  Eigen::MatrixXd same(2, 1);
  same << 1.0, 1.0;
  const Eigen::MatrixXd p_same = comembership_matrix(draws, {2, 1}, same, 1.0);
  CHECK(p_same(0, 1) == doctest::Approx(1.0));
  CHECK(p_same(0, 0) == doctest::Approx(1.0));

  // Points glued to distinct far-apart centers never share one.
  Eigen::MatrixXd apart(2, 1);
  apart << -10.0, 10.0;
  const Eigen::MatrixXd p_apart = comembership_matrix(draws, {2, 1}, apart, 1.0);
  CHECK(p_apart(0, 1) == doctest::Approx(0.0));
  CHECK(p_apart(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("comembership matrix is symmetric with unit diagonal and [0,1] entries") {
  RandomEngine rng(11);
  std::vector<Eigen::VectorXd> draws;
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd v(4);
    for (int j = 0; j < 4; ++j) v[j] = 3.0 * rng.normal();
    draws.push_back(v);
  }
  Eigen::MatrixXd points(5, 2);
  for (int i = 0; i < 5; ++i) {
    points(i, 0) = rng.normal();
    points(i, 1) = rng.normal();
  }
  const Eigen::MatrixXd p = comembership_matrix(draws, {2, 2}, points, 1.0);
  for (int i = 0; i < 5; ++i) {
    CHECK(p(i, i) == doctest::Approx(1.0));
    for (int j = 0; j < 5; ++j) {
      CHECK(p(i, j) == doctest::Approx(p(j, i)));
      CHECK(p(i, j) >= 0.0);
      CHECK(p(i, j) <= 1.0);
    }
  }
  CHECK_THROWS_AS(comembership_matrix(draws, {2, 2}, Eigen::MatrixXd(0, 2), 1.0),
                  std::invalid_argument);
}

TEST_CASE("comembership probabilities match a grid-quadrature oracle on a tiny model") {
  // L=2, d=1, three data points: the exact posterior over (theta_1, theta_2)
  // is integrable on a grid; comembership is the posterior probability that
  // the two test points sit closer to the same center.
  MixtureSpec model;
  model.L = 2;
  model.tau2 = 2.0;
  model.sigma2 = 0.5;
  model.pi = Eigen::VectorXd::Constant(2, 0.5);
  model.X = Eigen::MatrixXd(3, 1);
  model.X << -1.1, 1.3, 0.9;

  Eigen::MatrixXd test_points(3, 1);
  test_points << -1.0, 1.0, 1.2;

  // Oracle: trapezoid grid over the exact posterior.
  const int grid = 220;
  const double lo = -5.0, hi = 5.0;
  const double step = (hi - lo) / (grid - 1);
  Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(3, 3);
  double mass = 0.0;
  DataPartition all;
  all.row_indices = {0, 1, 2};
  for (int a = 0; a < grid; ++a) {
    for (int b = 0; b < grid; ++b) {
      Eigen::MatrixXd theta(2, 1);
      theta << lo + a * step, lo + b * step;
      const double w = std::exp(
          mixture_partition_log_density(model, all, theta, TemperingMode::subposterior(1)));
      mass += w;
      std::vector<int> assign(3);
      for (int i = 0; i < 3; ++i) {
        assign[i] = std::abs(test_points(i, 0) - theta(0, 0)) <=
                            std::abs(test_points(i, 0) - theta(1, 0))
                        ? 0
                        : 1;
      }
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          if (assign[i] == assign[j]) oracle(i, j) += w;
        }
      }
    }
  }
  oracle /= mass;

  // Sampler-based estimate through the public path.
  SamplerConfig cfg;
  cfg.iterations = 40500;
  cfg.burnin = 500;
  cfg.thin = 2;
  cfg.hmc_step_size = 0.4;
  cfg.hmc_leapfrog_steps = 8;
  const auto draws =
      hmc_mixture(model, all, TemperingMode::subposterior(1), cfg, 77);
  const Eigen::MatrixXd estimate = comembership_matrix(draws, {2, 1}, test_points, model.sigma2);

  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(estimate(i, j) - oracle(i, j)) < 0.02);
    }
  }
}

TEST_CASE("summarize medians and quartiles") {
  const EvaluationReport single = summarize({0.1}, "vcmc", "first_moments");
  CHECK(single.median == doctest::Approx(0.1));
  CHECK(single.q1 == doctest::Approx(0.1));
  CHECK(single.q3 == doctest::Approx(0.1));
  CHECK(single.n_functions == 1);

  const EvaluationReport odd = summarize({0.1, 0.2, 0.3}, "vcmc", "s");
  CHECK(odd.median == doctest::Approx(0.2));

  const EvaluationReport four = summarize({1.0, 2.0, 3.0, 4.0}, "vcmc", "s");
  CHECK(four.median == doctest::Approx(2.5));
  CHECK(four.q1 == doctest::Approx(1.75));
  CHECK(four.q3 == doctest::Approx(3.25));

  const EvaluationReport with_excluded =
      summarize({0.5, std::nullopt, 0.7}, "vcmc", "s");
  CHECK(with_excluded.n_functions == 2);
  CHECK(with_excluded.n_excluded == 1);

  CHECK_THROWS_AS(summarize({std::nullopt}, "vcmc", "s"), std::invalid_argument);
}

TEST_CASE("report JSON carries the documented fields") {
  const EvaluationReport r = summarize({0.25, 0.5, 0.75, 1.0}, "gaussian_cmc", "eigenvalues");
  const std::string j = r.to_json();
  for (const char* field : {"algorithm", "suite", "median", "q1", "q3", "n_functions",
                            "n_excluded"}) {
    CHECK(j.find(field) != std::string::npos);
  }
}

TEST_CASE("joint trimming keeps the jointly best-estimated functions") {
  std::map<std::string, std::vector<std::optional<double>>> errors;
  errors["a"] = {0.1, 0.9, 0.2, std::nullopt, 0.3};
  errors["b"] = {0.2, 0.1, 0.3, 0.1, 0.25};
  // Worst-across-methods scores: {0.2, 0.9, 0.3, inf, 0.3}; keep 60% -> 3 of 5.
  const auto retained = trim_jointly(errors, 0.6);
  CHECK(retained == std::vector<int>({0, 2, 4}));
}

TEST_CASE("identical samples give all-zero errors and medians") {
  RandomEngine rng(13);
  std::vector<Eigen::VectorXd> draws;
  for (int i = 0; i < 30; ++i) draws.push_back(vec2(rng.normal() + 1.0, rng.normal() - 2.0));
  TestFunctionSuite suite{SuiteKind::FirstMoments, 2};
  const auto est = estimate_expectations(draws, {1, 2}, suite);
  std::vector<std::optional<double>> errors(est.size());
  for (std::size_t f = 0; f < est.size(); ++f) errors[f] = relative_error(est[f], est[f]);
  const EvaluationReport report = summarize(errors, "serial", "first_moments");
  CHECK(report.median == doctest::Approx(0.0));
  CHECK(report.q1 == doctest::Approx(0.0));
  CHECK(report.q3 == doctest::Approx(0.0));
}

TEST_CASE("errors CSV marks exclusions") {
  const std::vector<std::string> names{"f0", "f1"};
  const std::vector<double> est{1.0, 2.0};
  const std::vector<double> ref{1.1, 0.0};
  const std::vector<std::optional<double>> errors{relative_error(1.0, 1.1),
                                                  relative_error(2.0, 0.0)};
  const std::string csv = errors_to_csv(names, est, ref, errors);
  CHECK(csv.find("excluded") != std::string::npos);
  CHECK(csv.find("f0") != std::string::npos);
  CHECK(csv.rfind("function,estimate,reference,error\n", 0) == 0);
}
