#include "vcmc/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vcmc/hungarian.hpp"

namespace vcmc {

using nlohmann::json;

std::string weight_family_name(WeightFamily family) {
  switch (family) {
    case WeightFamily::Vector: return "vector";
    case WeightFamily::Spectral: return "spectral";
    case WeightFamily::Combinatorial: return "combinatorial";
  }
  throw std::logic_error("unknown weight family");
}

WeightFamily weight_family_from_name(const std::string& name) {
  if (name == "vector") return WeightFamily::Vector;
  if (name == "spectral") return WeightFamily::Spectral;
  if (name == "combinatorial") return WeightFamily::Combinatorial;
  throw std::invalid_argument("unknown weight family: " + name);
}

void Alignment::validate() const {
  const int l = L();
  for (int k = 0; k < K(); ++k) {
    if (static_cast<int>(perms[k].size()) != l) {
      throw std::invalid_argument("alignment: ragged permutation list");
    }
    std::vector<char> seen(l, 0);
    for (int idx : perms[k]) {
      if (idx < 0 || idx >= l || seen[idx]) {
        throw std::invalid_argument("alignment: not a permutation");
      }
      seen[idx] = 1;
    }
  }
  if (K() > 0) {
    for (int idx = 0; idx < l; ++idx) {
      if (perms[0][idx] != idx) {
        throw std::invalid_argument("alignment: partition 0 must be the identity");
      }
    }
  }
}

void validate_weights(const WeightSet& weights, double floor, double tol) {
  const int expected_blocks = weights.K * weights.L;
  if (static_cast<int>(weights.blocks.size()) != expected_blocks) {
    throw std::invalid_argument("weights: block count mismatch");
  }
  for (const auto& b : weights.blocks) {
    if (b.size() != weights.d) throw std::invalid_argument("weights: block length mismatch");
    if (b.minCoeff() < floor) throw std::invalid_argument("weights: entry below floor");
  }
  for (int l = 0; l < weights.L; ++l) {
    for (int j = 0; j < weights.d; ++j) {
      double s = 0.0;
      for (int k = 0; k < weights.K; ++k) s += weights.block(k, l)[j];
      if (std::abs(s - 1.0) > tol) {
        throw std::invalid_argument("weights: coordinate does not sum to 1");
      }
    }
  }
  if (weights.family == WeightFamily::Combinatorial) {
    if (!weights.alignment) throw std::invalid_argument("weights: combinatorial needs an alignment");
    weights.alignment->validate();
    if (weights.alignment->K() != weights.K || weights.alignment->L() != weights.L) {
      throw std::invalid_argument("weights: alignment shape mismatch");
    }
  } else if (weights.L != 1) {
    throw std::invalid_argument("weights: L > 1 requires the combinatorial family");
  }
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v, double floor, double total) {
  const int k = static_cast<int>(v.size());
  if (!v.allFinite()) throw std::invalid_argument("project_to_simplex: non-finite input");
  const double mass = total - floor * k;
  if (mass <= 0.0) {
    throw std::invalid_argument("project_to_simplex: floor * K >= total");
  }
  // Shift by the floor, project onto the simplex of size `mass`, shift back.
  std::vector<double> z(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) z[i] = v[i] - floor;
  std::vector<double> sorted = z;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0, tau = 0.0;
  for (int i = 0; i < k; ++i) {
    cumsum += sorted[i];
    const double candidate = (cumsum - mass) / (i + 1);
    if (sorted[i] - candidate > 0.0) {
      tau = candidate;
    }
  }
  Eigen::VectorXd out(k);
  for (int i = 0; i < k; ++i) out[i] = std::max(z[i] - tau, 0.0) + floor;
  return out;
}

WeightSet uniform_weights(int k, int d, WeightFamily family, int num_clusters) {
  if (k < 1 || d < 1) throw std::invalid_argument("uniform_weights: need K >= 1, d >= 1");
  WeightSet w;
  w.family = family;
  w.K = k;
  w.d = d;
  w.L = family == WeightFamily::Combinatorial ? num_clusters : 1;
  w.blocks.assign(static_cast<std::size_t>(k) * w.L,
                  Eigen::VectorXd::Constant(d, 1.0 / k));
  return w;
}

namespace {

// Coordinate views the Gaussian-averaging variance runs over, one length-d
// vector per draw.
std::vector<std::vector<Eigen::VectorXd>> family_coordinates(
    const SubposteriorSampleSet& samples, WeightFamily family, const Alignment* alignment) {
  const int k = samples.K();
  std::vector<std::vector<Eigen::VectorXd>> coords(k);
  switch (family) {
    case WeightFamily::Vector:
      for (int i = 0; i < k; ++i) coords[i] = samples.draws[i];
      break;
    case WeightFamily::Spectral: {
      for (int i = 0; i < k; ++i) {
        coords[i].reserve(samples.draws[i].size());
        for (const auto& flat : samples.draws[i]) {
          coords[i].push_back(
              canonical_eigendecomposition(unflatten(flat, samples.shape)).values);
        }
      }
      break;
    }
    case WeightFamily::Combinatorial: {
      if (alignment == nullptr) {
        throw std::invalid_argument("gaussian_weights: combinatorial needs an alignment");
      }
      // Aligned flattening: global cluster l reads worker cluster a_{kl}.
      const int l = alignment->L();
      const int d = samples.shape.cols;
      for (int i = 0; i < k; ++i) {
        coords[i].reserve(samples.draws[i].size());
        for (const auto& flat : samples.draws[i]) {
          Eigen::VectorXd v(static_cast<Eigen::Index>(l) * d);
          for (int g = 0; g < l; ++g) {
            v.segment(static_cast<Eigen::Index>(g) * d, d) =
                flat.segment(static_cast<Eigen::Index>(alignment->perms[i][g]) * d, d);
          }
          coords[i].push_back(std::move(v));
        }
      }
      break;
    }
  }
  return coords;
}

}  // namespace

WeightSet gaussian_weights(const SubposteriorSampleSet& samples, WeightFamily family,
                           const Alignment* alignment) {
  const int k = samples.K();
  if (k < 1) throw std::invalid_argument("gaussian_weights: empty sample set");
  for (const auto& list : samples.draws) {
    if (list.size() < 2) {
      throw std::invalid_argument("gaussian_weights: need >= 2 draws per partition");
    }
  }

  const auto coords = family_coordinates(samples, family, alignment);
  const int dim = static_cast<int>(coords.front().front().size());

  Eigen::MatrixXd inv_var(k, dim);
  for (int i = 0; i < k; ++i) {
    const double t = static_cast<double>(coords[i].size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (const auto& v : coords[i]) mean += v;
    mean /= t;
    Eigen::VectorXd ss = Eigen::VectorXd::Zero(dim);
    for (const auto& v : coords[i]) ss += (v - mean).cwiseAbs2();
    // Unbiased variance with a small regularizer so degenerate coordinates
    // cannot produce infinite weights.
    inv_var.row(i) = (ss / (t - 1.0)).array() + 1e-12;
    inv_var.row(i) = inv_var.row(i).cwiseInverse();
  }

  WeightSet w;
  w.family = family;
  w.K = k;
  w.L = family == WeightFamily::Combinatorial ? alignment->L() : 1;
  w.d = family == WeightFamily::Combinatorial ? samples.shape.cols : dim;
  w.blocks.assign(static_cast<std::size_t>(k) * w.L, Eigen::VectorXd::Zero(w.d));
  if (family == WeightFamily::Combinatorial) w.alignment = *alignment;

  for (int j = 0; j < dim; ++j) {
    Eigen::VectorXd col = inv_var.col(j);
    col /= col.sum();
    // Keep the floor invariant without disturbing interior weights.
    col = project_to_simplex(col, kWeightFloor);
    for (int i = 0; i < k; ++i) {
      const int l = j / w.d;
      w.block(i, l)[j % w.d] = col[i];
    }
  }
  return w;
}

EigenDecomposition canonical_eigendecomposition(const Eigen::MatrixXd& a) {
  const int d = static_cast<int>(a.rows());
  if (a.cols() != d) throw std::invalid_argument("eigendecomposition: matrix must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("eigendecomposition: matrix must be symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition: solver failed");
  }

  // Descending by a stable sort over the solver's output, so ties keep the
  // solver order and the decomposition stays a deterministic function.
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a1, int b1) {
    return es.eigenvalues()[a1] > es.eigenvalues()[b1];
  });

  EigenDecomposition out;
  out.values = Eigen::VectorXd(d);
  out.R = Eigen::MatrixXd(d, d);
  for (int i = 0; i < d; ++i) {
    out.values[i] = es.eigenvalues()[order[i]];
    Eigen::VectorXd vec = es.eigenvectors().col(order[i]);
    for (int j = 0; j < d; ++j) {
      if (std::abs(vec[j]) > 1e-12) {
        if (vec[j] < 0.0) vec = -vec;
        break;
      }
    }
    out.R.row(i) = vec.transpose();
  }
  return out;
}

namespace {

void check_family(const WeightSet& weights, WeightFamily expected, const char* where) {
  if (weights.family != expected) {
    throw std::invalid_argument(std::string(where) + ": weight family mismatch");
  }
}

void check_counts(const WeightSet& weights, const SubposteriorSampleSet& samples,
                  const char* where) {
  if (weights.K != samples.K()) {
    throw std::invalid_argument(std::string(where) + ": partition count mismatch");
  }
  if (samples.T() == 0) {
    throw std::invalid_argument(std::string(where) + ": empty sample set");
  }
}

}  // namespace

AggregatedSampleSet aggregate_linear(const WeightSet& weights,
                                     const SubposteriorSampleSet& samples) {
  check_family(weights, WeightFamily::Vector, "aggregate_linear");
  check_counts(weights, samples, "aggregate_linear");
  if (weights.d != samples.shape.size()) {
    throw std::invalid_argument("aggregate_linear: weight/draw length mismatch");
  }

  AggregatedSampleSet out;
  out.shape = samples.shape;
  const int t = samples.T();
  out.draws.resize(t);
  for (int i = 0; i < t; ++i) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(weights.d);
    for (int k = 0; k < weights.K; ++k) {
      acc += weights.block(k).cwiseProduct(samples.draws[k][i]);
    }
    out.draws[i] = std::move(acc);
  }
  return out;
}

AggregatedSampleSet aggregate_spectral(const WeightSet& weights,
                                       const SubposteriorSampleSet& samples) {
  check_family(weights, WeightFamily::Spectral, "aggregate_spectral");
  check_counts(weights, samples, "aggregate_spectral");
  const int d = samples.shape.rows;
  if (samples.shape.cols != d || weights.d != d) {
    throw std::invalid_argument("aggregate_spectral: need square draws matching weight length");
  }

  AggregatedSampleSet out;
  out.shape = samples.shape;
  const int t = samples.T();
  out.draws.resize(t);
  for (int i = 0; i < t; ++i) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k < weights.K; ++k) {
      const auto eig = canonical_eigendecomposition(unflatten(samples.draws[k][i], samples.shape));
      if (eig.values.minCoeff() < -1e-10 * std::max(1.0, std::abs(eig.values.maxCoeff()))) {
        throw std::invalid_argument("aggregate_spectral: draw is not PSD");
      }
      const Eigen::VectorXd scaled =
          weights.block(k).cwiseProduct(eig.values.cwiseMax(0.0));
      acc.noalias() += eig.R.transpose() * scaled.asDiagonal() * eig.R;
    }
    // Symmetrize away accumulation round-off.
    acc = 0.5 * (acc + acc.transpose());
    out.draws[i] = flatten(acc);
  }
  return out;
}

AggregatedSampleSet aggregate_combinatorial(const WeightSet& weights,
                                            const SubposteriorSampleSet& samples) {
  check_family(weights, WeightFamily::Combinatorial, "aggregate_combinatorial");
  check_counts(weights, samples, "aggregate_combinatorial");
  if (!weights.alignment) {
    throw std::invalid_argument("aggregate_combinatorial: missing alignment");
  }
  const Alignment& align = *weights.alignment;
  const int l = weights.L;
  const int d = weights.d;
  if (samples.shape.rows != l || samples.shape.cols != d) {
    throw std::invalid_argument("aggregate_combinatorial: draw shape mismatch");
  }
  align.validate();
  if (align.K() != weights.K || align.L() != l) {
    throw std::invalid_argument("aggregate_combinatorial: alignment shape mismatch");
  }

  AggregatedSampleSet out;
  out.shape = samples.shape;
  const int t = samples.T();
  out.draws.resize(t);
  for (int i = 0; i < t; ++i) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(l) * d);
    for (int k = 0; k < weights.K; ++k) {
      const Eigen::VectorXd& flat = samples.draws[k][i];
      for (int g = 0; g < l; ++g) {
        acc.segment(static_cast<Eigen::Index>(g) * d, d) +=
            weights.block(k, g).cwiseProduct(
                flat.segment(static_cast<Eigen::Index>(align.perms[k][g]) * d, d));
      }
    }
    out.draws[i] = std::move(acc);
  }
  return out;
}

AggregatedSampleSet aggregate(const WeightSet& weights, const SubposteriorSampleSet& samples) {
  switch (weights.family) {
    case WeightFamily::Vector: return aggregate_linear(weights, samples);
    case WeightFamily::Spectral: return aggregate_spectral(weights, samples);
    case WeightFamily::Combinatorial: return aggregate_combinatorial(weights, samples);
  }
  throw std::logic_error("unknown weight family");
}

std::vector<Eigen::MatrixXd> cluster_means(const SubposteriorSampleSet& samples,
                                           int num_clusters) {
  const int d = samples.shape.cols;
  if (samples.shape.rows != num_clusters) {
    throw std::invalid_argument("cluster_means: shape does not match cluster count");
  }
  std::vector<Eigen::MatrixXd> means;
  means.reserve(samples.K());
  for (const auto& list : samples.draws) {
    if (list.empty()) throw std::invalid_argument("cluster_means: empty sample list");
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_clusters) * d);
    for (const auto& v : list) mean += v;
    mean /= static_cast<double>(list.size());
    means.push_back(unflatten(mean, samples.shape));
  }
  return means;
}

Alignment align_clusters(const SubposteriorSampleSet& samples, int num_clusters) {
  const auto means = cluster_means(samples, num_clusters);
  const int k = samples.K();

  Alignment align;
  align.perms.resize(k);
  align.perms[0].resize(num_clusters);
  std::iota(align.perms[0].begin(), align.perms[0].end(), 0);

  for (int i = 1; i < k; ++i) {
    Eigen::MatrixXd cost(num_clusters, num_clusters);
    for (int l = 0; l < num_clusters; ++l) {
      for (int m = 0; m < num_clusters; ++m) {
        cost(l, m) = (means[i].row(m) - means[0].row(l)).squaredNorm();
      }
    }
    align.perms[i] = solve_assignment(cost);
  }
  return align;
}

std::string weights_to_json(const WeightSet& weights) {
  json j;
  j["family"] = weight_family_name(weights.family);
  j["K"] = weights.K;
  j["d"] = weights.d;
  if (weights.family == WeightFamily::Combinatorial) {
    j["L"] = weights.L;
    json perms = json::array();
    for (const auto& p : weights.alignment->perms) perms.push_back(p);
    j["alignment"] = perms;
    json blocks = json::array();
    for (int k = 0; k < weights.K; ++k) {
      json per_cluster = json::array();
      for (int l = 0; l < weights.L; ++l) {
        per_cluster.push_back(std::vector<double>(
            weights.block(k, l).data(), weights.block(k, l).data() + weights.d));
      }
      blocks.push_back(per_cluster);
    }
    j["weights"] = blocks;
  } else {
    json blocks = json::array();
    for (int k = 0; k < weights.K; ++k) {
      blocks.push_back(std::vector<double>(weights.block(k).data(),
                                           weights.block(k).data() + weights.d));
    }
    j["weights"] = blocks;
  }
  return j.dump(2);
}

WeightSet weights_from_json(const std::string& text) {
  const json j = json::parse(text);
  WeightSet w;
  w.family = weight_family_from_name(j.at("family").get<std::string>());
  w.K = j.at("K").get<int>();
  w.d = j.at("d").get<int>();
  w.L = w.family == WeightFamily::Combinatorial ? j.at("L").get<int>() : 1;
  w.blocks.assign(static_cast<std::size_t>(w.K) * w.L, Eigen::VectorXd::Zero(w.d));
  if (w.family == WeightFamily::Combinatorial) {
    Alignment align;
    for (const auto& p : j.at("alignment")) {
      align.perms.push_back(p.get<std::vector<int>>());
    }
    w.alignment = std::move(align);
    for (int k = 0; k < w.K; ++k) {
      for (int l = 0; l < w.L; ++l) {
        const auto vals = j.at("weights").at(k).at(l).get<std::vector<double>>();
        if (static_cast<int>(vals.size()) != w.d) {
          throw std::invalid_argument("weights json: block length mismatch");
        }
        w.block(k, l) = Eigen::Map<const Eigen::VectorXd>(vals.data(), w.d);
      }
    }
  } else {
    for (int k = 0; k < w.K; ++k) {
      const auto vals = j.at("weights").at(k).get<std::vector<double>>();
      if (static_cast<int>(vals.size()) != w.d) {
        throw std::invalid_argument("weights json: block length mismatch");
      }
      w.block(k) = Eigen::Map<const Eigen::VectorXd>(vals.data(), w.d);
    }
  }
  validate_weights(w);
  return w;
}

}  // namespace vcmc
