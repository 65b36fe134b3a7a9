#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "vcmc/types.hpp"

namespace vcmc {

/// Per-partition empirical mean and raw second moment of the flattened draws.
/// S_k is the mean of outer products, not mean-centered.
struct SubposteriorMoments {
  std::vector<Eigen::VectorXd> mean;           // mu_k
  std::vector<Eigen::MatrixXd> second_moment;  // S_k = E[theta theta^T]

  int K() const { return static_cast<int>(mean.size()); }
};

/// K ordered lists of flattened parameter draws plus partition metadata.
struct SubposteriorSampleSet {
  ParamShape shape;
  TemperingMode mode;
  std::vector<std::vector<Eigen::VectorXd>> draws;  // [K][T]
  std::vector<std::uint64_t> seeds;                 // per-partition RNG seeds
  std::optional<SubposteriorMoments> moment_cache;

  int K() const { return static_cast<int>(draws.size()); }
  int T() const { return draws.empty() ? 0 : static_cast<int>(draws.front().size()); }

  /// Truncate every partition's list to the minimum common draw count.
  void truncate_to_common_length();
};

/// Empirical moments per partition; requires at least two draws each.
SubposteriorMoments compute_moments(const SubposteriorSampleSet& samples);

/// Compute once and keep on the sample set.
const SubposteriorMoments& cached_moments(SubposteriorSampleSet& samples);

}  // namespace vcmc
