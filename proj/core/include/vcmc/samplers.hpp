#pragma once

#include <cstdint>
#include <vector>

#include "vcmc/models.hpp"
#include "vcmc/partition.hpp"
#include "vcmc/sample_set.hpp"

namespace vcmc {

struct SamplerConfig {
  int iterations = 5100;
  int burnin = 100;
  int thin = 5;
  std::uint64_t seed = 0;       // master seed; per-partition seeds are derived
  double hmc_step_size = 0.05;
  int hmc_leapfrog_steps = 20;
  bool hmc_auto_tune = true;

  void validate() const;

  /// Number of draws kept after burn-in and thinning.
  int kept_draws() const { return (iterations - burnin + thin - 1) / thin; }
};

/// Per-partition sampler diagnostics (HMC acceptance, tuned step size).
struct SamplerDiagnostics {
  std::vector<double> acceptance_rate;  // 1.0 for exact/Gibbs samplers
  std::vector<double> hmc_step_size;    // 0 where not applicable
};

/// Data-augmented Gibbs sampler for the probit model on one partition.
/// Alternates truncated-normal latents and the Gaussian full conditional
/// beta | z ~ N(Sigma X^T z, Sigma), Sigma = (prior precision + X^T X)^{-1}.
std::vector<Eigen::VectorXd> gibbs_probit(const ProbitSpec& model,
                                          const DataPartition& partition,
                                          TemperingMode mode, const SamplerConfig& cfg,
                                          std::uint64_t seed);

/// One draw of the probit full conditional beta | z. Exposed for the
/// stationarity check.
Eigen::VectorXd probit_beta_conditional(const Eigen::MatrixXd& x, const Eigen::VectorXd& z,
                                        double prior_precision, class RandomEngine& rng);

/// Exact conjugate draws of the Wishart-distributed precision on one
/// partition, generated via the Bartlett construction.
std::vector<Eigen::VectorXd> sample_niw_precision(const NiwSpec& model,
                                                  const DataPartition& partition,
                                                  TemperingMode mode,
                                                  const SamplerConfig& cfg,
                                                  std::uint64_t seed);

/// One Wishart(df, scale) draw via Bartlett. Exposed for moment tests.
Eigen::MatrixXd wishart_draw(double df, const Eigen::MatrixXd& scale,
                             class RandomEngine& rng);

/// |H(end) - H(start)| over one leapfrog trajectory from the given state and
/// momentum; shrinks as eps^2. Exposed for integrator-order diagnostics.
double hmc_energy_error(const MixtureSpec& model, const DataPartition& partition,
                        TemperingMode mode, const Eigen::MatrixXd& theta0,
                        const Eigen::MatrixXd& momentum0, double eps, int leapfrog);

/// Leapfrog HMC with Metropolis correction on the mixture centers.
std::vector<Eigen::VectorXd> hmc_mixture(const MixtureSpec& model,
                                         const DataPartition& partition,
                                         TemperingMode mode, const SamplerConfig& cfg,
                                         std::uint64_t seed, double* acceptance_out = nullptr,
                                         double* tuned_step_out = nullptr);

/// Runs the model's sampler on every partition with per-partition derived
/// seeds. The result is a pure function of (model, partitions, mode, cfg);
/// the thread count only affects wall time.
SubposteriorSampleSet run_parallel(const ModelSpec& model, const PartitionSet& partitions,
                                   TemperingMode mode, const SamplerConfig& cfg,
                                   int threads = 0, SamplerDiagnostics* diagnostics = nullptr);

/// Serial chain on the full dataset: the K=1 subposterior with the partition-0
/// derived seed, so a K=1 parallel run reproduces it bit for bit.
SubposteriorSampleSet sample_serial(const ModelSpec& model, const SamplerConfig& cfg,
                                    SamplerDiagnostics* diagnostics = nullptr);

}  // namespace vcmc
