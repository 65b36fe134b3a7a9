#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "vcmc/sample_set.hpp"
#include "vcmc/types.hpp"

namespace vcmc {

enum class WeightFamily { Vector, Spectral, Combinatorial };

std::string weight_family_name(WeightFamily family);
WeightFamily weight_family_from_name(const std::string& name);

/// Per-partition permutations mapping global cluster labels to worker-local
/// ones; partition 0 is pinned to the identity.
struct Alignment {
  std::vector<std::vector<int>> perms;  // perms[k][l] = worker-k cluster for global label l

  int K() const { return static_cast<int>(perms.size()); }
  int L() const { return perms.empty() ? 0 : static_cast<int>(perms.front().size()); }
  void validate() const;
};

/// Diagonal nonnegative weights on the per-coordinate simplex: for every
/// coordinate j (and cluster l in the combinatorial family),
/// sum_k w[k](j) = 1 and every entry stays above the floor.
struct WeightSet {
  WeightFamily family = WeightFamily::Vector;
  int K = 0;
  int d = 0;  // weight-block length (flattened size for Vector, spectrum size for Spectral)
  int L = 1;  // > 1 only for Combinatorial
  std::vector<Eigen::VectorXd> blocks;  // K*L blocks of length d
  std::optional<Alignment> alignment;   // Combinatorial only

  Eigen::VectorXd& block(int k, int l = 0) { return blocks.at(static_cast<std::size_t>(k) * L + l); }
  const Eigen::VectorXd& block(int k, int l = 0) const {
    return blocks.at(static_cast<std::size_t>(k) * L + l);
  }
};

inline constexpr double kWeightFloor = 1e-6;

/// Shared validator for the simplex invariants; throws on violation.
void validate_weights(const WeightSet& weights, double floor = kWeightFloor,
                      double tol = 1e-10);

/// Exact Euclidean projection of v onto {w : w >= floor, sum w = total} by
/// sort-and-threshold on the shifted simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v, double floor = 0.0,
                                   double total = 1.0);

/// All entries 1/K.
WeightSet uniform_weights(int k, int d, WeightFamily family = WeightFamily::Vector,
                          int num_clusters = 1);

/// Inverse-variance weights, normalized per coordinate to the simplex. The
/// variance is the unbiased (n-1) estimate plus a 1e-12 regularizer, taken in
/// the family's coordinate system: flattened coordinates for Vector, the
/// canonical spectrum for Spectral, aligned per-cluster coordinates for
/// Combinatorial.
WeightSet gaussian_weights(const SubposteriorSampleSet& samples,
                           WeightFamily family = WeightFamily::Vector,
                           const Alignment* alignment = nullptr);

/// Deterministic symmetric eigendecomposition A = R^T diag(d) R with
/// eigenvalues sorted descending and each eigenvector's first nonzero
/// component made positive.
struct EigenDecomposition {
  Eigen::MatrixXd R;       // rows are eigenvectors
  Eigen::VectorXd values;  // descending
};
EigenDecomposition canonical_eigendecomposition(const Eigen::MatrixXd& a);

struct AggregatedSampleSet {
  ParamShape shape;
  std::vector<Eigen::VectorXd> draws;
  std::string weights_id;
  std::string samples_id;

  int T() const { return static_cast<int>(draws.size()); }
};

/// theta_hat_t = sum_k w_k o theta_{k,t}, elementwise over flattened draws.
AggregatedSampleSet aggregate_linear(const WeightSet& weights,
                                     const SubposteriorSampleSet& samples);

/// PSD-preserving recombination of eigenvalue spectra in per-draw eigenbases:
/// sum_k R_k^T [W_k D_k] R_k.
AggregatedSampleSet aggregate_spectral(const WeightSet& weights,
                                       const SubposteriorSampleSet& samples);

/// Per-cluster weighted average of alignment-mapped worker centers.
AggregatedSampleSet aggregate_combinatorial(const WeightSet& weights,
                                            const SubposteriorSampleSet& samples);

/// Dispatch on the weight family.
AggregatedSampleSet aggregate(const WeightSet& weights, const SubposteriorSampleSet& samples);

/// Hungarian matching of worker cluster means against partition 0's means,
/// minimizing sum_l ||mean_{k,a_{kl}} - mean_{1,l}||^2 exactly.
Alignment align_clusters(const SubposteriorSampleSet& samples, int num_clusters);

/// Cluster-mean matrices used by the alignment objective (one L x d matrix
/// per partition).
std::vector<Eigen::MatrixXd> cluster_means(const SubposteriorSampleSet& samples,
                                           int num_clusters);

std::string weights_to_json(const WeightSet& weights);
WeightSet weights_from_json(const std::string& text);

}  // namespace vcmc
