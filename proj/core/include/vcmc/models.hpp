#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <variant>

#include "vcmc/partition.hpp"
#include "vcmc/types.hpp"

namespace vcmc {

/// Probit regression with a spherical Gaussian prior on the coefficients.
/// Parameter: beta, stored as a 1 x d row.
struct ProbitSpec {
  Eigen::MatrixXd X;   // N x d design matrix
  Eigen::VectorXi y;   // labels in {0, 1}
  double sigma2 = 1.0; // prior variance
};

/// Wishart-distributed precision matrix with a Gaussian likelihood around a
/// point-estimated mean. Parameter: Lambda, d x d symmetric PSD.
struct NiwSpec {
  double nu = 0.0;     // prior degrees of freedom, > d - 1
  Eigen::MatrixXd V;   // d x d PSD scale matrix
  Eigen::VectorXd mu;  // point-estimated mean
  Eigen::MatrixXd X;   // N x d observations
};

/// Isotropic Gaussian mixture with known weights and variances.
/// Parameter: cluster centers, L x d.
struct MixtureSpec {
  int L = 1;
  double tau2 = 1.0;    // prior variance of each center
  double sigma2 = 1.0;  // likelihood variance
  Eigen::VectorXd pi;   // mixture weights on the L-simplex
  Eigen::MatrixXd X;    // N x d observations
};

using ModelSpec = std::variant<ProbitSpec, NiwSpec, MixtureSpec>;

enum class ModelKind { Probit, NormalInverseWishart, GaussianMixture };

ModelKind model_kind(const ModelSpec& model);
std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

ParamShape param_shape(const ModelSpec& model);
int data_count(const ModelSpec& model);

/// Throws std::invalid_argument if the spec violates its invariants
/// (non-PSD scale, weights off the simplex, nonpositive variances, ...).
void validate_model(const ModelSpec& model);

/// Log prior density, exact including normalizing constants.
double log_prior(const ModelSpec& model, const Eigen::MatrixXd& theta);

/// Log likelihood of the given data rows (all rows if `rows` is empty and
/// `all_rows` is true).
double log_likelihood(const ModelSpec& model, const Eigen::MatrixXd& theta,
                      std::span<const int> rows);
double log_likelihood_all(const ModelSpec& model, const Eigen::MatrixXd& theta);

/// log p(theta) + sum_n log p(x_n | theta). Normalizing constants are exact,
/// so partition-level densities sum back to this without bookkeeping.
double log_joint(const ModelSpec& model, const Eigen::MatrixXd& theta);

/// Partition-level target: likelihood on the block plus the tempered prior
/// (power 1/K for subposteriors, 1 for partial posteriors).
double partition_log_density(const ModelSpec& model, const DataPartition& partition,
                             const Eigen::MatrixXd& theta, TemperingMode mode);

/// Mixture partition target without the variant wrapper; HMC calls this per
/// leapfrog step.
double mixture_partition_log_density(const MixtureSpec& model,
                                     const DataPartition& partition,
                                     const Eigen::MatrixXd& theta, TemperingMode mode);

/// Gradient of partition_log_density for the mixture model, taken with
/// respect to the L x d center matrix. Used by HMC.
Eigen::MatrixXd mixture_partition_grad(const MixtureSpec& model,
                                       const DataPartition& partition,
                                       const Eigen::MatrixXd& theta,
                                       TemperingMode mode);

}  // namespace vcmc
