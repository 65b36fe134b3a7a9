#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "test_util.hpp"
#include "vcmc/aggregation.hpp"
#include "vcmc/hungarian.hpp"
#include "vcmc/rng.hpp"

using namespace vcmc;
using vcmc::testing::random_psd;

namespace {

SubposteriorSampleSet vector_samples(const std::vector<std::vector<Eigen::VectorXd>>& draws,
                                     int d) {
  SubposteriorSampleSet s;
  s.shape = {1, d};
  s.draws = draws;
  s.seeds.assign(draws.size(), 0);
  return s;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("uniform weights") {
  const WeightSet w = uniform_weights(2, 3);
  for (int k = 0; k < 2; ++k) {
    CHECK(w.block(k).minCoeff() == doctest::Approx(0.5));
    CHECK(w.block(k).maxCoeff() == doctest::Approx(0.5));
  }
  const WeightSet identity = uniform_weights(1, 4);
  CHECK(identity.block(0).minCoeff() == doctest::Approx(1.0));
  CHECK_NOTHROW(validate_weights(w));
  CHECK_NOTHROW(validate_weights(identity));
}

TEST_CASE("weight validator catches violations") {
  WeightSet w = uniform_weights(2, 2);
  w.block(0)[1] = 0.7;  // column no longer sums to one
  CHECK_THROWS_AS(validate_weights(w), std::invalid_argument);

  WeightSet below = uniform_weights(2, 2);
  below.block(0)[0] = 1e-9;
  below.block(1)[0] = 1.0 - 1e-9;
  CHECK_THROWS_AS(validate_weights(below), std::invalid_argument);
}

TEST_CASE("gaussian weights from hand-computed variances") {
  // Partition 1 draws {0, 2}: unbiased variance 2. Partition 2 draws {0, 6}:
  // variance 18. Inverse-variance normalization gives 0.9 / 0.1.
  std::vector<std::vector<Eigen::VectorXd>> draws(2);
  draws[0] = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 2.0)};
  draws[1] = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 6.0)};
  const WeightSet w = gaussian_weights(vector_samples(draws, 1));
  CHECK(w.block(0)[0] == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(w.block(1)[0] == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("gaussian weights: identical lists and K=3 symmetry") {
  std::vector<std::vector<Eigen::VectorXd>> same(2);
  same[0] = {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 3.0)};
  same[1] = same[0];
  const WeightSet w = gaussian_weights(vector_samples(same, 1));
  CHECK(w.block(0)[0] == doctest::Approx(0.5));
  CHECK(w.block(1)[0] == doctest::Approx(0.5));

  std::vector<std::vector<Eigen::VectorXd>> three(3);
  for (int k = 0; k < 3; ++k) {
    three[k] = {Eigen::VectorXd::Constant(1, static_cast<double>(k)),
                Eigen::VectorXd::Constant(1, k + 2.0)};  // all variances equal
  }
  const WeightSet w3 = gaussian_weights(vector_samples(three, 1));
  for (int k = 0; k < 3; ++k) CHECK(w3.block(k)[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("gaussian weights reduce to uniform for equal variances") {
  RandomEngine rng(3);
  std::vector<std::vector<Eigen::VectorXd>> draws(4);
  std::vector<Eigen::VectorXd> base;
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd v(3);
    for (int j = 0; j < 3; ++j) v[j] = rng.normal();
    base.push_back(v);
  }
  for (int k = 0; k < 4; ++k) {
    draws[k] = base;
    for (auto& v : draws[k]) v.array() += k;  // shift changes the mean only
  }
  const WeightSet w = gaussian_weights(vector_samples(draws, 3));
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(w.block(k)[j] - 0.25) < 1e-9);
    }
  }
}

TEST_CASE("gaussian weights require two draws per partition") {
  std::vector<std::vector<Eigen::VectorXd>> draws(1);
  draws[0] = {Eigen::VectorXd::Zero(1)};
  CHECK_THROWS_AS(gaussian_weights(vector_samples(draws, 1)), std::invalid_argument);
}

TEST_CASE("linear aggregation: identity, mean, and weighted combination") {
  std::vector<std::vector<Eigen::VectorXd>> one(1);
  one[0] = {vec2(1.5, -2.0)};
  const AggregatedSampleSet id =
      aggregate_linear(uniform_weights(1, 2), vector_samples(one, 2));
  CHECK(id.draws[0] == vec2(1.5, -2.0));

  std::vector<std::vector<Eigen::VectorXd>> two(2);
  two[0] = {vec2(2.0, 0.0)};
  two[1] = {vec2(0.0, 2.0)};
  const AggregatedSampleSet mean =
      aggregate_linear(uniform_weights(2, 2), vector_samples(two, 2));
  CHECK(mean.draws[0] == vec2(1.0, 1.0));

  WeightSet w = uniform_weights(2, 2);
  w.block(0) = vec2(0.25, 0.75);
  w.block(1) = vec2(0.75, 0.25);
  std::vector<std::vector<Eigen::VectorXd>> pair(2);
  pair[0] = {vec2(4.0, 4.0)};
  pair[1] = {vec2(0.0, 0.0)};
  const AggregatedSampleSet mixed = aggregate_linear(w, vector_samples(pair, 2));
  CHECK(mixed.draws[0] == vec2(1.0, 3.0));
}

TEST_CASE("linear aggregation rejects family and shape mismatches") {
  WeightSet spectral = uniform_weights(1, 2, WeightFamily::Spectral);
  std::vector<std::vector<Eigen::VectorXd>> one(1);
  one[0] = {vec2(1.0, 1.0)};
  CHECK_THROWS_AS(aggregate_linear(spectral, vector_samples(one, 2)), std::invalid_argument);

  WeightSet wrong_d = uniform_weights(1, 3);
  CHECK_THROWS_AS(aggregate_linear(wrong_d, vector_samples(one, 2)), std::invalid_argument);
}

TEST_CASE("linear aggregation is affine-equivariant on the simplex") {
  RandomEngine rng(11);
  std::vector<std::vector<Eigen::VectorXd>> draws(3);
  for (int k = 0; k < 3; ++k) {
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd v(2);
      v << rng.normal(), rng.normal();
      draws[k].push_back(v);
    }
  }
  const WeightSet w = vcmc::testing::random_weights(3, 2, rng);
  const Eigen::VectorXd shift = vec2(0.7, -1.3);

  auto shifted = draws;
  for (auto& list : shifted) {
    for (auto& v : list) v += shift;
  }
  const auto base = aggregate_linear(w, vector_samples(draws, 2));
  const auto moved = aggregate_linear(w, vector_samples(shifted, 2));
  for (int t = 0; t < 5; ++t) {
    CHECK((moved.draws[t] - base.draws[t] - shift).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("canonical eigendecomposition: identity and a diagonal flip") {
  const auto id = canonical_eigendecomposition(Eigen::MatrixXd::Identity(2, 2));
  CHECK(id.values == Eigen::VectorXd::Ones(2));
  CHECK((id.R - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.0, 4.0;
  const auto flip = canonical_eigendecomposition(a);
  CHECK(flip.values[0] == doctest::Approx(4.0));
  CHECK(flip.values[1] == doctest::Approx(1.0));
  Eigen::MatrixXd swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  CHECK((flip.R - swap).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("canonical eigendecomposition reconstructs and is deterministic") {
  RandomEngine rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform_below(4));
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j <= i; ++j) {
        a(i, j) = rng.normal();
        a(j, i) = a(i, j);
      }
    }
    const auto eig = canonical_eigendecomposition(a);
    const Eigen::MatrixXd rebuilt = eig.R.transpose() * eig.values.asDiagonal() * eig.R;
    CHECK((rebuilt - a).norm() <= 1e-9 * std::max(1.0, a.norm()));
    for (int i = 0; i + 1 < d; ++i) CHECK(eig.values[i] >= eig.values[i + 1]);

    const auto again = canonical_eigendecomposition(a);
    CHECK(eig.R == again.R);
    CHECK(eig.values == again.values);
  }
  CHECK_THROWS_AS(canonical_eigendecomposition(Eigen::MatrixXd::Random(3, 3)),
                  std::invalid_argument);
}

TEST_CASE("spectral aggregation: identity at K=1 and a hand-computed pair") {
  RandomEngine rng(31);
  SubposteriorSampleSet one;
  one.shape = {2, 2};
  one.draws.resize(1);
  const Eigen::MatrixXd psd = random_psd(2, rng);
  one.draws[0] = {flatten(psd)};
  one.seeds = {0};
  const auto id = aggregate_spectral(uniform_weights(1, 2, WeightFamily::Spectral), one);
  CHECK((unflatten(id.draws[0], {2, 2}) - psd).norm() <= 1e-9 * psd.norm());

  SubposteriorSampleSet two;
  two.shape = {2, 2};
  two.draws.resize(2);
  Eigen::MatrixXd d1(2, 2), d2(2, 2);
  d1 << 4.0, 0.0, 0.0, 1.0;
  d2 << 2.0, 0.0, 0.0, 2.0;
  two.draws[0] = {flatten(d1)};
  two.draws[1] = {flatten(d2)};
  two.seeds = {0, 0};
  const auto mean = aggregate_spectral(uniform_weights(2, 2, WeightFamily::Spectral), two);
  // Eigenvalues pair by descending order: (4,2)/2 = 3 and (1,2)/2 = 1.5; the
  // shared eigenbasis is axis-aligned.
  const Eigen::MatrixXd m = unflatten(mean.draws[0], {2, 2});
  CHECK(m(0, 0) + m(1, 1) == doctest::Approx(4.5).epsilon(1e-12));
  Eigen::VectorXd evs = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
  CHECK(evs[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(evs[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("spectral aggregation preserves PSD over random rotated inputs") {
  RandomEngine rng(37);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform_below(3));
    const int k = 1 + static_cast<int>(rng.uniform_below(3));
    SubposteriorSampleSet s;
    s.shape = {d, d};
    s.draws.resize(k);
    for (int i = 0; i < k; ++i) s.draws[i] = {flatten(random_psd(d, rng, 0.0, 3.0))};
    s.seeds.assign(k, 0);
    const WeightSet w =
        vcmc::testing::random_weights(k, d, rng, WeightFamily::Spectral);
    const auto agg = aggregate_spectral(w, s);
    const Eigen::MatrixXd m = unflatten(agg.draws[0], {d, d});
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("spectral aggregation rejects non-PSD draws") {
  SubposteriorSampleSet s;
  s.shape = {2, 2};
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.0, 0.0, -0.5;
  s.draws = {{flatten(bad)}};
  s.seeds = {0};
  CHECK_THROWS_AS(aggregate_spectral(uniform_weights(1, 2, WeightFamily::Spectral), s),
                  std::invalid_argument);
}

TEST_CASE("hungarian assignment equals brute force on random instances") {
  RandomEngine rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(5));  // up to 6
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform();
    }
    const auto assignment = solve_assignment(cost);
    const double got = assignment_cost(cost, assignment);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      best = std::min(best, assignment_cost(cost, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("align_clusters: identity, forced swap, and brute-force optimality") {
  // Identical cluster means: identity permutations.
  SubposteriorSampleSet s;
  s.shape = {2, 2};
  Eigen::MatrixXd centers(2, 2);
  centers << 1.0, 1.0, -1.0, -1.0;
  s.draws = {{flatten(centers)}, {flatten(centers)}};
  s.seeds = {0, 0};
  Alignment align = align_clusters(s, 2);
  CHECK(align.perms[0] == std::vector<int>({0, 1}));
  CHECK(align.perms[1] == std::vector<int>({0, 1}));

  // Partition 2 sees the clusters with labels swapped.
  Eigen::MatrixXd swapped(2, 2);
  swapped.row(0) = centers.row(1);
  swapped.row(1) = centers.row(0);
  s.draws[1] = {flatten(swapped)};
  align = align_clusters(s, 2);
  CHECK(align.perms[1] == std::vector<int>({1, 0}));

  // Random means at L=4: objective matches exhaustive search.
  RandomEngine rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    SubposteriorSampleSet r;
    r.shape = {4, 3};
    r.draws.resize(2);
    Eigen::MatrixXd m1(4, 3), m2(4, 3);
    for (int l = 0; l < 4; ++l) {
      for (int j = 0; j < 3; ++j) {
        m1(l, j) = rng.normal();
        m2(l, j) = rng.normal();
      }
    }
    r.draws[0] = {flatten(m1)};
    r.draws[1] = {flatten(m2)};
    r.seeds = {0, 0};
    const Alignment got = align_clusters(r, 4);

    auto objective = [&](const std::vector<int>& perm) {
      double total = 0.0;
      for (int l = 0; l < 4; ++l) total += (m2.row(perm[l]) - m1.row(l)).squaredNorm();
      return total;
    };
    std::vector<int> perm{0, 1, 2, 3};
    double best = std::numeric_limits<double>::infinity();
    do {
      best = std::min(best, objective(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(objective(got.perms[1]) == doctest::Approx(best).epsilon(1e-12));
    // Never worse than leaving labels alone.
    CHECK(objective(got.perms[1]) <= objective({0, 1, 2, 3}) + 1e-15);
  }
}

TEST_CASE("combinatorial aggregation: identity, aligned average, symmetry") {
  // K=1 identity.
  SubposteriorSampleSet one;
  one.shape = {2, 2};
  Eigen::MatrixXd centers(2, 2);
  centers << 1.0, 2.0, 3.0, 4.0;
  one.draws = {{flatten(centers)}};
  one.seeds = {0};
  WeightSet w1 = uniform_weights(1, 2, WeightFamily::Combinatorial, 2);
  w1.alignment = Alignment{{{0, 1}}};
  const auto id = aggregate_combinatorial(w1, one);
  CHECK(id.draws[0] == flatten(centers));

  // L=2, K=2 uniform with a swap on partition 2.
  SubposteriorSampleSet two;
  two.shape = {2, 2};
  Eigen::MatrixXd t1(2, 2), t2(2, 2);
  t1 << 1.0, 1.0, 3.0, 3.0;
  t2 << 5.0, 5.0, -1.0, -1.0;
  two.draws = {{flatten(t1)}, {flatten(t2)}};
  two.seeds = {0, 0};
  WeightSet w2 = uniform_weights(2, 2, WeightFamily::Combinatorial, 2);
  w2.alignment = Alignment{{{0, 1}, {1, 0}}};
  const auto agg = aggregate_combinatorial(w2, two);
  const Eigen::MatrixXd merged = unflatten(agg.draws[0], {2, 2});
  CHECK(merged.row(0) == Eigen::RowVector2d(0.0, 0.0));  // avg of (1,1), (-1,-1)
  CHECK(merged.row(1) == Eigen::RowVector2d(4.0, 4.0));  // avg of (3,3), (5,5)

  // Identical partitions, identity alignment: partition-1 draws come back.
  two.draws[1] = two.draws[0];
  w2.alignment = Alignment{{{0, 1}, {0, 1}}};
  const auto same = aggregate_combinatorial(w2, two);
  CHECK((same.draws[0] - flatten(t1)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("alignment validation") {
  Alignment bad;
  bad.perms = {{0, 1}, {0, 0}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  Alignment not_identity;
  not_identity.perms = {{1, 0}, {0, 1}};
  CHECK_THROWS_AS(not_identity.validate(), std::invalid_argument);
}

TEST_CASE("weights JSON round trip") {
  RandomEngine rng(47);
  WeightSet v = vcmc::testing::random_weights(3, 4, rng);
  const WeightSet v2 = weights_from_json(weights_to_json(v));
  CHECK(v2.family == v.family);
  REQUIRE(v2.blocks.size() == v.blocks.size());
  for (std::size_t i = 0; i < v.blocks.size(); ++i) {
    CHECK(v2.blocks[i] == v.blocks[i]);  // exact: JSON carries full precision
  }

  WeightSet c = vcmc::testing::random_weights(2, 3, rng, WeightFamily::Combinatorial, 2);
  c.alignment = Alignment{{{0, 1}, {1, 0}}};
  const WeightSet c2 = weights_from_json(weights_to_json(c));
  CHECK(c2.alignment->perms == c.alignment->perms);
  for (std::size_t i = 0; i < c.blocks.size(); ++i) {
    CHECK(c2.blocks[i] == c.blocks[i]);
  }
}

TEST_CASE("project_to_simplex matches hand results") {
  CHECK(project_to_simplex(vec2(0.2, 0.8)) == vec2(0.2, 0.8));
  const Eigen::VectorXd p = project_to_simplex(vec2(1.2, 0.9));
  CHECK(p[0] == doctest::Approx(0.65).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.35).epsilon(1e-12));
  const Eigen::VectorXd floored = project_to_simplex(vec2(-1.0, 3.0), 1e-6);
  CHECK(floored[0] == doctest::Approx(1e-6));
  CHECK(floored[1] == doctest::Approx(1.0 - 1e-6));
}
