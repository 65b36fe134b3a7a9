#include "vcmc/variational.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "vcmc/mathutil.hpp"
#include "vcmc/rng.hpp"

namespace vcmc {

namespace {

constexpr double kPhiClamp = 1e-12;

double clamp_prob(double p, long* clamp_events) {
  if (p < kPhiClamp) {
    if (clamp_events) ++*clamp_events;
    return kPhiClamp;
  }
  if (p > 1.0 - kPhiClamp) {
    if (clamp_events) ++*clamp_events;
    return 1.0 - kPhiClamp;
  }
  return p;
}

void check_batch(std::span<const int> batch, int t, const char* where) {
  if (batch.empty()) throw std::invalid_argument(std::string(where) + ": empty batch");
  for (int idx : batch) {
    if (idx < 0 || idx >= t) throw std::out_of_range(std::string(where) + ": batch index");
  }
}

double block_log_det(const WeightSet& weights, int k) {
  double s = 0.0;
  for (int l = 0; l < weights.L; ++l) {
    const auto& b = weights.block(k, l);
    if (b.minCoeff() <= 0.0) {
      throw std::domain_error("relaxed_entropy: nonpositive weight entry");
    }
    s += b.array().log().sum();
  }
  return s;
}

}  // namespace

std::string entropy_mode_name(EntropyMode mode) {
  return mode == EntropyMode::RelaxedMean ? "relaxed_mean" : "relaxed_max";
}

EntropyMode entropy_mode_from_name(const std::string& name) {
  if (name == "relaxed_mean") return EntropyMode::RelaxedMean;
  if (name == "relaxed_max") return EntropyMode::RelaxedMax;
  throw std::invalid_argument("unknown entropy mode: " + name);
}

void ObjectiveConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("objective config: batch size must be >= 1");
  if (iterations < 0) throw std::invalid_argument("objective config: iterations must be >= 0");
  if (!(step_a > 0.0) || step_b < 0.0) {
    throw std::invalid_argument("objective config: need a > 0, b >= 0");
  }
  if (!(weight_floor >= 0.0)) throw std::invalid_argument("objective config: bad weight floor");
}

std::string OptimizerTrace::to_csv() const {
  std::string out = "iteration,objective,grad_norm,step,seconds\n";
  char line[160];
  for (std::size_t i = 0; i < objective.size(); ++i) {
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g,%.6f\n", i, objective[i],
                  grad_norm[i], step_size[i], seconds[i]);
    out += line;
  }
  return out;
}

double relaxed_entropy(const WeightSet& weights, EntropyMode mode) {
  double acc = mode == EntropyMode::RelaxedMax ? -std::numeric_limits<double>::infinity() : 0.0;
  for (int k = 0; k < weights.K; ++k) {
    const double ld = block_log_det(weights, k);
    if (mode == EntropyMode::RelaxedMax) {
      acc = std::max(acc, ld);
    } else {
      acc += ld;
    }
  }
  return mode == EntropyMode::RelaxedMax ? acc : acc / weights.K;
}

WeightGradient relaxed_entropy_grad(const WeightSet& weights, EntropyMode mode) {
  WeightGradient g(weights.blocks.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = Eigen::VectorXd::Zero(weights.d);

  if (mode == EntropyMode::RelaxedMean) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = weights.blocks[i].cwiseInverse() / weights.K;
    }
    return g;
  }
  int best = 0;
  double best_ld = block_log_det(weights, 0);
  for (int k = 1; k < weights.K; ++k) {
    const double ld = block_log_det(weights, k);
    if (ld > best_ld) {
      best_ld = ld;
      best = k;
    }
  }
  for (int l = 0; l < weights.L; ++l) {
    g[static_cast<std::size_t>(best) * weights.L + l] =
        weights.block(best, l).cwiseInverse();
  }
  return g;
}

Eigen::VectorXd aggregate_draw(const WeightSet& weights, const SubposteriorSampleSet& samples,
                               int t) {
  switch (weights.family) {
    case WeightFamily::Vector: {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(weights.d);
      for (int k = 0; k < weights.K; ++k) {
        acc += weights.block(k).cwiseProduct(samples.draws[k][t]);
      }
      return acc;
    }
    case WeightFamily::Spectral: {
      const int d = samples.shape.rows;
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
      for (int k = 0; k < weights.K; ++k) {
        const auto eig =
            canonical_eigendecomposition(unflatten(samples.draws[k][t], samples.shape));
        acc.noalias() += eig.R.transpose() *
                         weights.block(k).cwiseProduct(eig.values.cwiseMax(0.0)).asDiagonal() *
                         eig.R;
      }
      acc = 0.5 * (acc + acc.transpose());
      return flatten(acc);
    }
    case WeightFamily::Combinatorial: {
      const Alignment& align = *weights.alignment;
      const int d = weights.d;
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(weights.L) * d);
      for (int k = 0; k < weights.K; ++k) {
        for (int l = 0; l < weights.L; ++l) {
          acc.segment(static_cast<Eigen::Index>(l) * d, d) +=
              weights.block(k, l).cwiseProduct(samples.draws[k][t].segment(
                  static_cast<Eigen::Index>(align.perms[k][l]) * d, d));
        }
      }
      return acc;
    }
  }
  throw std::logic_error("unknown weight family");
}

double estimate_objective(const ModelSpec& model, const WeightSet& weights,
                          const SubposteriorSampleSet& samples, std::span<const int> batch,
                          EntropyMode mode) {
  check_batch(batch, samples.T(), "estimate_objective");
  double acc = 0.0;
  for (int t : batch) {
    acc += log_joint(model, unflatten(aggregate_draw(weights, samples, t), samples.shape));
  }
  return acc / static_cast<double>(batch.size()) + relaxed_entropy(weights, mode);
}

// --- Probit -------------------------------------------------------------------

namespace {

// Shared prior-term helper: m_w = sum_k w_k o mu_k.
Eigen::VectorXd weighted_mean(const SubposteriorMoments& moments, const WeightSet& weights) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(weights.d);
  for (int k = 0; k < weights.K; ++k) {
    m += weights.block(k).cwiseProduct(moments.mean[k]);
  }
  return m;
}

}  // namespace

double probit_batch_objective(const ProbitSpec& model, const SubposteriorMoments& moments,
                              const WeightSet& weights, const SubposteriorSampleSet& samples,
                              std::span<const int> batch, EntropyMode mode) {
  check_batch(batch, samples.T(), "probit_batch_objective");
  const int n = static_cast<int>(model.X.rows());

  // Prior expectation in closed form from the moments.
  double quad = weighted_mean(moments, weights).squaredNorm();
  for (int k = 0; k < weights.K; ++k) {
    const Eigen::VectorXd& w = weights.block(k);
    const Eigen::VectorXd diag_s = moments.second_moment[k].diagonal();
    const Eigen::VectorXd mu2 = moments.mean[k].cwiseAbs2();
    quad += w.cwiseAbs2().dot(diag_s - mu2);
  }
  double objective = -0.5 * quad / model.sigma2;

  // Monte Carlo data term.
  if (n > 0) {
    double data = 0.0;
    for (int t : batch) {
      const Eigen::VectorXd beta = aggregate_draw(weights, samples, t);
      const Eigen::VectorXd eta = model.X * beta;
      for (int i = 0; i < n; ++i) {
        const double p = clamp_prob(normal_cdf(model.y[i] == 1 ? eta[i] : -eta[i]), nullptr);
        data += std::log(p);
      }
    }
    objective += data / static_cast<double>(batch.size());
  }
  return objective + relaxed_entropy(weights, mode);
}

WeightGradient grad_probit(const ProbitSpec& model, const SubposteriorMoments& moments,
                           const WeightSet& weights, const SubposteriorSampleSet& samples,
                           std::span<const int> batch, EntropyMode mode, long* clamp_events) {
  check_batch(batch, samples.T(), "grad_probit");
  const int n = static_cast<int>(model.X.rows());

  WeightGradient g = relaxed_entropy_grad(weights, mode);

  const Eigen::VectorXd m_w = weighted_mean(moments, weights);
  for (int k = 0; k < weights.K; ++k) {
    const Eigen::VectorXd& w = weights.block(k);
    const Eigen::VectorXd& mu = moments.mean[k];
    const Eigen::VectorXd diag_s = moments.second_moment[k].diagonal();
    // -sigma^{-2} [diag(S_k) o w_k + sum_{l != k} (mu_k o mu_l) o w_l]
    g[k] -= (diag_s.cwiseProduct(w) + mu.cwiseProduct(m_w - w.cwiseProduct(mu))) / model.sigma2;
  }

  if (n > 0) {
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    Eigen::VectorXd s(n);
    for (int t : batch) {
      const Eigen::VectorXd beta = aggregate_draw(weights, samples, t);
      const Eigen::VectorXd eta = model.X * beta;
      for (int i = 0; i < n; ++i) {
        // Inverse-Mills form of phi/(Phi(1-Phi)) * (y - Phi).
        const double phi = normal_pdf(eta[i]);
        if (model.y[i] == 1) {
          s[i] = phi / clamp_prob(normal_cdf(eta[i]), clamp_events);
        } else {
          s[i] = -phi / clamp_prob(normal_cdf(-eta[i]), clamp_events);
        }
      }
      const Eigen::VectorXd xs = model.X.transpose() * s;
      for (int k = 0; k < weights.K; ++k) {
        g[k] += inv_b * samples.draws[k][t].cwiseProduct(xs);
      }
    }
  }
  return g;
}

// --- Normal-inverse Wishart -----------------------------------------------------

NiwVariationalData make_niw_variational_data(const NiwSpec& model,
                                             const SubposteriorSampleSet& samples) {
  const int d = static_cast<int>(model.V.rows());
  const int n = static_cast<int>(model.X.rows());
  const int k = samples.K();

  NiwVariationalData data;
  data.coef_logdet = 0.5 * (model.nu + n - d - 1);

  Eigen::MatrixXd m = model.V.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
  if (n > 0) {
    m += model.X.transpose() * model.X;
  }
  const Eigen::VectorXd xbar =
      n > 0 ? Eigen::VectorXd(model.X.colwise().mean()) : Eigen::VectorXd::Zero(d);

  data.values.resize(k);
  data.bases.resize(k);
  data.linear_coef.resize(k);
  for (int i = 0; i < k; ++i) {
    const auto& list = samples.draws[i];
    data.values[i].reserve(list.size());
    data.bases[i].reserve(list.size());
    data.linear_coef[i].reserve(list.size());
    for (const auto& flat : list) {
      auto eig = canonical_eigendecomposition(unflatten(flat, samples.shape));
      // Linear part of L0 in (w o d): -1/2 diag(R M R^T) + N (R mu o R xbar)
      //                               - N/2 (R mu o R mu)
      const Eigen::MatrixXd rm = eig.R * m;
      Eigen::VectorXd lin(d);
      for (int j = 0; j < d; ++j) lin[j] = -0.5 * rm.row(j).dot(eig.R.row(j));
      if (n > 0) {
        const Eigen::VectorXd rmu = eig.R * model.mu;
        const Eigen::VectorXd rxbar = eig.R * xbar;
        lin += n * rmu.cwiseProduct(rxbar) - 0.5 * n * rmu.cwiseAbs2();
      }
      data.values[i].push_back(eig.values.cwiseMax(0.0));
      data.bases[i].push_back(std::move(eig.R));
      data.linear_coef[i].push_back(std::move(lin));
    }
  }
  return data;
}

namespace {

int niw_dim(const NiwVariationalData& data) {
  return static_cast<int>(data.values.front().front().size());
}

Eigen::MatrixXd niw_aggregate(const NiwVariationalData& data, const WeightSet& weights, int t) {
  const int d = niw_dim(data);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < weights.K; ++k) {
    s.noalias() += data.bases[k][t].transpose() *
                   weights.block(k).cwiseProduct(data.values[k][t]).asDiagonal() *
                   data.bases[k][t];
  }
  return 0.5 * (s + s.transpose());
}

}  // namespace

double niw_batch_objective(const NiwVariationalData& data, const WeightSet& weights,
                           std::span<const int> batch, EntropyMode mode) {
  const int t_max = static_cast<int>(data.values.front().size());
  check_batch(batch, t_max, "niw_batch_objective");

  double acc = 0.0;
  for (int t : batch) {
    double l0 = 0.0;
    for (int k = 0; k < weights.K; ++k) {
      l0 += data.linear_coef[k][t].dot(weights.block(k).cwiseProduct(data.values[k][t]));
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(niw_aggregate(data, weights, t));
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("niw objective: aggregated matrix is singular");
    }
    double log_det = 0.0;
    for (int j = 0; j < niw_dim(data); ++j) {
      log_det += 2.0 * std::log(llt.matrixL()(j, j));
    }
    acc += l0 + data.coef_logdet * log_det;
  }
  return acc / static_cast<double>(batch.size()) + relaxed_entropy(weights, mode);
}

WeightGradient grad_niw(const NiwVariationalData& data, const WeightSet& weights,
                        std::span<const int> batch, EntropyMode mode) {
  const int t_max = static_cast<int>(data.values.front().size());
  check_batch(batch, t_max, "grad_niw");
  const int d = niw_dim(data);

  WeightGradient g = relaxed_entropy_grad(weights, mode);
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  for (int t : batch) {
    const Eigen::MatrixXd s = niw_aggregate(data, weights, t);
    const Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error(
          "niw gradient: aggregated matrix is singular (min weight " +
          std::to_string(weights.blocks.front().minCoeff()) + ")");
    }
    const Eigen::MatrixXd s_inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
    for (int k = 0; k < weights.K; ++k) {
      const Eigen::MatrixXd rs = data.bases[k][t] * s_inv;
      Eigen::VectorXd diag_rs(d);
      for (int j = 0; j < d; ++j) diag_rs[j] = rs.row(j).dot(data.bases[k][t].row(j));
      g[k] += inv_b * data.values[k][t].cwiseProduct(data.linear_coef[k][t] +
                                                     data.coef_logdet * diag_rs);
    }
  }
  return g;
}

// --- Mixture of Gaussians -------------------------------------------------------

namespace {

struct MogBatchTerm {
  double l0 = 0.0;
  Eigen::MatrixXd center_grad;  // dL0/du, L x d (only filled when requested)
};

// Evaluates the responsibility-weighted surrogate for one batch element and,
// optionally, its exact gradient with respect to the merged centers u.
MogBatchTerm mog_term(const MixtureSpec& model, const Eigen::MatrixXd& u, bool want_grad) {
  const int n = static_cast<int>(model.X.rows());
  const int l = model.L;
  const double s2 = model.sigma2;

  MogBatchTerm term;
  term.l0 = -0.5 * u.squaredNorm() / model.tau2;
  if (want_grad) term.center_grad = -u / model.tau2;

  std::vector<double> logits(l);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < l; ++m) {
      logits[m] = -0.5 * (u.row(m) - model.X.row(i)).squaredNorm() / s2;
    }
    const double lse = log_sum_exp(logits);
    double weighted_dist = 0.0;  // sum_m gamma_m ||u_m - x||^2
    for (int m = 0; m < l; ++m) {
      const double gamma = std::exp(logits[m] - lse);
      weighted_dist += gamma * (-2.0 * s2 * logits[m]);
      term.l0 += gamma * logits[m];
    }
    if (!want_grad) continue;
    for (int m = 0; m < l; ++m) {
      const double gamma = std::exp(logits[m] - lse);
      const Eigen::RowVectorXd diff = u.row(m) - model.X.row(i);
      const double dist2 = -2.0 * s2 * logits[m];
      // d/du_m of sum_l gamma_l g_l: the direct term plus the softmax coupling.
      term.center_grad.row(m) +=
          -gamma / s2 * diff + gamma * (dist2 - weighted_dist) / (2.0 * s2 * s2) * diff;
    }
  }
  return term;
}

Eigen::MatrixXd mog_merge(const MixtureSpec& model, const Alignment& align,
                          const WeightSet& weights, const SubposteriorSampleSet& samples,
                          int t) {
  const int d = static_cast<int>(model.X.cols());
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(model.L, d);
  for (int k = 0; k < weights.K; ++k) {
    const Eigen::VectorXd& flat = samples.draws[k][t];
    for (int l = 0; l < model.L; ++l) {
      u.row(l) += weights.block(k, l)
                      .cwiseProduct(flat.segment(
                          static_cast<Eigen::Index>(align.perms[k][l]) * d, d))
                      .transpose();
    }
  }
  return u;
}

}  // namespace

double mog_batch_objective(const MixtureSpec& model, const Alignment& alignment,
                           const WeightSet& weights, const SubposteriorSampleSet& samples,
                           std::span<const int> batch, EntropyMode mode) {
  check_batch(batch, samples.T(), "mog_batch_objective");
  double acc = 0.0;
  for (int t : batch) {
    acc += mog_term(model, mog_merge(model, alignment, weights, samples, t), false).l0;
  }
  return acc / static_cast<double>(batch.size()) + relaxed_entropy(weights, mode);
}

WeightGradient grad_mog(const MixtureSpec& model, const Alignment& alignment,
                        const WeightSet& weights, const SubposteriorSampleSet& samples,
                        std::span<const int> batch, EntropyMode mode) {
  check_batch(batch, samples.T(), "grad_mog");
  const int d = static_cast<int>(model.X.cols());

  WeightGradient g = relaxed_entropy_grad(weights, mode);
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  for (int t : batch) {
    const Eigen::MatrixXd u = mog_merge(model, alignment, weights, samples, t);
    const MogBatchTerm term = mog_term(model, u, true);
    for (int k = 0; k < weights.K; ++k) {
      const Eigen::VectorXd& flat = samples.draws[k][t];
      for (int l = 0; l < model.L; ++l) {
        g[static_cast<std::size_t>(k) * weights.L + l] +=
            inv_b *
            flat.segment(static_cast<Eigen::Index>(alignment.perms[k][l]) * d, d)
                .cwiseProduct(term.center_grad.row(l).transpose());
      }
    }
  }
  return g;
}

// --- Projection and optimizer ----------------------------------------------------

WeightSet project_weights(WeightSet raw, double floor) {
  if (floor * raw.K >= 1.0) {
    throw std::invalid_argument("project_weights: K * floor >= 1");
  }
  Eigen::VectorXd column(raw.K);
  for (int l = 0; l < raw.L; ++l) {
    for (int j = 0; j < raw.d; ++j) {
      for (int k = 0; k < raw.K; ++k) column[k] = raw.block(k, l)[j];
      column = project_to_simplex(column, floor);
      for (int k = 0; k < raw.K; ++k) raw.block(k, l)[j] = column[k];
    }
  }
  return raw;
}

namespace {

// Without-replacement batch stream with epoch reshuffling.
class BatchStream {
 public:
  BatchStream(int t, std::uint64_t seed) : order_(t), rng_(seed) {
    for (int i = 0; i < t; ++i) order_[i] = i;
    reshuffle();
  }

  std::vector<int> next(int batch_size) {
    std::vector<int> batch;
    batch.reserve(batch_size);
    while (static_cast<int>(batch.size()) < batch_size) {
      if (cursor_ == order_.size()) {
        reshuffle();
        cursor_ = 0;
      }
      batch.push_back(order_[cursor_++]);
    }
    return batch;
  }

 private:
  void reshuffle() {
    for (int i = static_cast<int>(order_.size()) - 1; i > 0; --i) {
      const auto j = static_cast<int>(rng_.uniform_below(static_cast<std::uint64_t>(i) + 1));
      std::swap(order_[i], order_[j]);
    }
  }

  std::vector<int> order_;
  std::size_t cursor_ = 0;
  RandomEngine rng_;
};

double gradient_norm(const WeightGradient& g) {
  double s = 0.0;
  for (const auto& b : g) s += b.squaredNorm();
  return std::sqrt(s);
}

}  // namespace

OptimizeResult optimize(const ModelSpec& model, SubposteriorSampleSet& samples,
                        const ObjectiveConfig& cfg, std::uint64_t seed,
                        const Alignment* alignment) {
  cfg.validate();
  if (samples.K() < 1 || samples.T() < 1) {
    throw std::invalid_argument("optimize: empty sample set");
  }
  const ModelKind kind = model_kind(model);

  // Family and per-model fixed context.
  OptimizeResult result;
  Alignment computed_alignment;
  const Alignment* align = alignment;
  switch (kind) {
    case ModelKind::Probit:
      result.weights = uniform_weights(samples.K(), samples.shape.size(), WeightFamily::Vector);
      break;
    case ModelKind::NormalInverseWishart:
      result.weights = uniform_weights(samples.K(), samples.shape.rows, WeightFamily::Spectral);
      break;
    case ModelKind::GaussianMixture: {
      const auto& mix = std::get<MixtureSpec>(model);
      if (align == nullptr) {
        computed_alignment = align_clusters(samples, mix.L);
        align = &computed_alignment;
      }
      result.weights =
          uniform_weights(samples.K(), samples.shape.cols, WeightFamily::Combinatorial, mix.L);
      result.weights.alignment = *align;
      break;
    }
  }

  const SubposteriorMoments* moments = nullptr;
  NiwVariationalData niw_data;
  if (kind == ModelKind::Probit) {
    moments = &cached_moments(samples);
  } else if (kind == ModelKind::NormalInverseWishart) {
    niw_data = make_niw_variational_data(std::get<NiwSpec>(model), samples);
  }

  auto objective_at = [&](const WeightSet& w, std::span<const int> batch) {
    switch (kind) {
      case ModelKind::Probit:
        return probit_batch_objective(std::get<ProbitSpec>(model), *moments, w, samples, batch,
                                      cfg.entropy);
      case ModelKind::NormalInverseWishart:
        return niw_batch_objective(niw_data, w, batch, cfg.entropy);
      case ModelKind::GaussianMixture:
        return mog_batch_objective(std::get<MixtureSpec>(model), *align, w, samples, batch,
                                   cfg.entropy);
    }
    throw std::logic_error("unknown model kind");
  };
  auto gradient_at = [&](const WeightSet& w, std::span<const int> batch) {
    switch (kind) {
      case ModelKind::Probit:
        return grad_probit(std::get<ProbitSpec>(model), *moments, w, samples, batch,
                           cfg.entropy);
      case ModelKind::NormalInverseWishart:
        return grad_niw(niw_data, w, batch, cfg.entropy);
      case ModelKind::GaussianMixture:
        return grad_mog(std::get<MixtureSpec>(model), *align, w, samples, batch, cfg.entropy);
    }
    throw std::logic_error("unknown model kind");
  };

  BatchStream stream(samples.T(), derive_seed(seed, 0x0b5e55ULL));
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<int> batch = stream.next(cfg.batch_size);

    const double objective = objective_at(result.weights, batch);
    WeightGradient grad = gradient_at(result.weights, batch);
    const double norm = gradient_norm(grad);
    if (!std::isfinite(norm) || !std::isfinite(objective)) {
      result.aborted = true;
      result.abort_reason = "non-finite gradient or objective at iteration " +
                            std::to_string(iter);
      return result;
    }

    const double eta = cfg.step_a / (cfg.step_b + iter);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      result.weights.blocks[i] += eta * grad[i];
    }
    result.weights = project_weights(std::move(result.weights), cfg.weight_floor);
    validate_weights(result.weights, cfg.weight_floor);  // every iterate stays feasible

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.trace.objective.push_back(objective);
    result.trace.grad_norm.push_back(norm);
    result.trace.step_size.push_back(eta);
    result.trace.seconds.push_back(elapsed);
  }
  return result;
}

}  // namespace vcmc
