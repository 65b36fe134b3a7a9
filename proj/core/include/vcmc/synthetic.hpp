#pragma once

#include <cstdint>
#include <optional>

#include "vcmc/models.hpp"

namespace vcmc {

/// Seeded generators for the three model families. Each produces a fully
/// specified ModelSpec; the same (config, seed) pair always yields the same
/// dataset.

struct ProbitGeneratorConfig {
  int n = 1000;
  int d = 5;
  double sigma2 = 1.0;       // prior variance carried into the model
  double beta_scale = 1.0;   // true coefficients drawn N(0, beta_scale^2)
  std::optional<Eigen::VectorXd> beta_true;
};
ProbitSpec generate_probit(const ProbitGeneratorConfig& cfg, std::uint64_t seed);

struct NiwGeneratorConfig {
  int n = 1000;
  int d = 3;
  double nu = 0.0;       // 0 -> d + 2
  double v_scale = 1.0;  // V = v_scale * I
};
NiwSpec generate_niw(const NiwGeneratorConfig& cfg, std::uint64_t seed);

struct MixtureGeneratorConfig {
  int n = 1000;
  int d = 2;
  int num_clusters = 3;
  double tau2 = 4.0;
  double sigma2 = 1.0;
};
MixtureSpec generate_mixture(const MixtureGeneratorConfig& cfg, std::uint64_t seed);

}  // namespace vcmc
