#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vcmc/aggregation.hpp"
#include "vcmc/models.hpp"
#include "vcmc/sample_set.hpp"

namespace vcmc {

/// Which entropy lower bound the objective uses: the concave mean form or the
/// tighter max form.
enum class EntropyMode { RelaxedMean, RelaxedMax };

std::string entropy_mode_name(EntropyMode mode);
EntropyMode entropy_mode_from_name(const std::string& name);

struct ObjectiveConfig {
  EntropyMode entropy = EntropyMode::RelaxedMean;
  int batch_size = 40;
  int iterations = 25;
  double step_a = 0.1;   // eta_t = a / (b + t)
  double step_b = 10.0;
  double weight_floor = kWeightFloor;

  void validate() const;
};

struct OptimizerTrace {
  std::vector<double> objective;
  std::vector<double> grad_norm;
  std::vector<double> step_size;
  std::vector<double> seconds;

  std::string to_csv() const;
};

/// Gradient with respect to a WeightSet, stored with the same block layout.
using WeightGradient = std::vector<Eigen::VectorXd>;

/// Entropy lower bound as a function of the weights, dropping the constant
/// min_k H[p_k]: mean (or max) over partitions of sum_j log w. Requires
/// strictly positive entries.
double relaxed_entropy(const WeightSet& weights, EntropyMode mode = EntropyMode::RelaxedMean);

/// Gradient of relaxed_entropy; the max mode returns the subgradient on the
/// (first) attaining block.
WeightGradient relaxed_entropy_grad(const WeightSet& weights, EntropyMode mode);

/// Aggregate one index-aligned K-tuple of draws.
Eigen::VectorXd aggregate_draw(const WeightSet& weights, const SubposteriorSampleSet& samples,
                               int t);

/// Generic Monte Carlo objective estimate: batch average of
/// log_joint(F_W(theta)) plus the relaxed entropy.
double estimate_objective(const ModelSpec& model, const WeightSet& weights,
                          const SubposteriorSampleSet& samples, std::span<const int> batch,
                          EntropyMode mode = EntropyMode::RelaxedMean);

// --- Probit -----------------------------------------------------------------
// The prior expectation is closed-form in the subposterior moments; only the
// probit data term is Monte Carlo over the batch.

double probit_batch_objective(const ProbitSpec& model, const SubposteriorMoments& moments,
                              const WeightSet& weights, const SubposteriorSampleSet& samples,
                              std::span<const int> batch,
                              EntropyMode mode = EntropyMode::RelaxedMean);

WeightGradient grad_probit(const ProbitSpec& model, const SubposteriorMoments& moments,
                           const WeightSet& weights, const SubposteriorSampleSet& samples,
                           std::span<const int> batch,
                           EntropyMode mode = EntropyMode::RelaxedMean,
                           long* clamp_events = nullptr);

// --- Normal-inverse Wishart --------------------------------------------------

/// Per-draw quantities fixed across optimizer iterations: the canonical
/// eigendecomposition of each draw and the linear coefficient of the
/// objective in W_k.
struct NiwVariationalData {
  double coef_logdet = 0.0;  // (nu + N - d - 1) / 2
  std::vector<std::vector<Eigen::VectorXd>> values;      // D_k per (k, t)
  std::vector<std::vector<Eigen::MatrixXd>> bases;       // R_k per (k, t)
  std::vector<std::vector<Eigen::VectorXd>> linear_coef; // dL0/d(w o d) linear part
};

NiwVariationalData make_niw_variational_data(const NiwSpec& model,
                                             const SubposteriorSampleSet& samples);

double niw_batch_objective(const NiwVariationalData& data, const WeightSet& weights,
                           std::span<const int> batch,
                           EntropyMode mode = EntropyMode::RelaxedMean);

WeightGradient grad_niw(const NiwVariationalData& data, const WeightSet& weights,
                        std::span<const int> batch,
                        EntropyMode mode = EntropyMode::RelaxedMean);

// --- Mixture of Gaussians ----------------------------------------------------
// Responsibility-weighted quadratic surrogate with responsibilities recomputed
// from the merged centers at the current weights. The gradient differentiates
// the surrogate exactly, including the softmax coupling of the
// responsibilities to the weights.

double mog_batch_objective(const MixtureSpec& model, const Alignment& alignment,
                           const WeightSet& weights, const SubposteriorSampleSet& samples,
                           std::span<const int> batch,
                           EntropyMode mode = EntropyMode::RelaxedMean);

WeightGradient grad_mog(const MixtureSpec& model, const Alignment& alignment,
                        const WeightSet& weights, const SubposteriorSampleSet& samples,
                        std::span<const int> batch,
                        EntropyMode mode = EntropyMode::RelaxedMean);

// --- Projection and the optimizer loop ---------------------------------------

/// Euclidean projection of each per-coordinate K-vector onto
/// {v >= floor, sum v = 1}; idempotent on feasible input.
WeightSet project_weights(WeightSet raw, double floor = kWeightFloor);

struct OptimizeResult {
  WeightSet weights;
  OptimizerTrace trace;
  bool aborted = false;
  std::string abort_reason;
};

/// Projected stochastic gradient ascent from uniform weights. Batches are
/// drawn without replacement with epoch reshuffling; the whole run is a pure
/// function of (model, samples, cfg, seed).
OptimizeResult optimize(const ModelSpec& model, SubposteriorSampleSet& samples,
                        const ObjectiveConfig& cfg, std::uint64_t seed,
                        const Alignment* alignment = nullptr);

}  // namespace vcmc
