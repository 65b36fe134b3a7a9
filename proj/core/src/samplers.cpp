#include "vcmc/samplers.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "vcmc/rng.hpp"

namespace vcmc {

namespace {

struct KeepSchedule {
  int burnin;
  int thin;
  bool keep(int iter) const { return iter >= burnin && (iter - burnin) % thin == 0; }
};

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& x, std::span<const int> rows) {
  Eigen::MatrixXd out(static_cast<int>(rows.size()), x.cols());
  for (int i = 0; i < out.rows(); ++i) out.row(i) = x.row(rows[i]);
  return out;
}

}  // namespace

void SamplerConfig::validate() const {
  if (!(iterations > burnin) || burnin < 0) {
    throw std::invalid_argument("sampler config: need iterations > burnin >= 0");
  }
  if (thin < 1) throw std::invalid_argument("sampler config: thin must be >= 1");
  if (!(hmc_step_size > 0.0)) throw std::invalid_argument("sampler config: step size must be > 0");
  if (hmc_leapfrog_steps < 1) throw std::invalid_argument("sampler config: leapfrog steps must be >= 1");
}

Eigen::VectorXd probit_beta_conditional(const Eigen::MatrixXd& x, const Eigen::VectorXd& z,
                                        double prior_precision, RandomEngine& rng) {
  const int d = static_cast<int>(x.cols());
  Eigen::MatrixXd precision = x.transpose() * x;
  precision.diagonal().array() += prior_precision;
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("probit: precision Cholesky failed");
  }
  const Eigen::VectorXd mean = llt.solve(x.transpose() * z);
  Eigen::VectorXd xi(d);
  for (int j = 0; j < d; ++j) xi[j] = rng.normal();
  // beta = mean + L^{-T} xi has covariance precision^{-1}
  return mean + llt.matrixU().solve(xi);
}

std::vector<Eigen::VectorXd> gibbs_probit(const ProbitSpec& model,
                                          const DataPartition& partition,
                                          TemperingMode mode, const SamplerConfig& cfg,
                                          std::uint64_t seed) {
  cfg.validate();
  const int d = static_cast<int>(model.X.cols());
  const int n = partition.size();
  const double prior_precision = mode.prior_exponent() / model.sigma2;

  const Eigen::MatrixXd x = gather_rows(model.X, partition.rows());
  Eigen::VectorXi y(n);
  for (int i = 0; i < n; ++i) y[i] = model.y[partition.rows()[i]];

  Eigen::MatrixXd precision = x.transpose() * x;
  precision.diagonal().array() += prior_precision;
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("probit: precision Cholesky failed");
  }

  RandomEngine rng(seed);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);  // tempered-prior mean
  Eigen::VectorXd z(n), xi(d);
  const KeepSchedule keep{cfg.burnin, cfg.thin};

  std::vector<Eigen::VectorXd> out;
  out.reserve(cfg.kept_draws());
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const Eigen::VectorXd eta = x * beta;
    for (int i = 0; i < n; ++i) {
      z[i] = rng.truncated_normal_sign(eta[i], y[i] == 1);
    }
    const Eigen::VectorXd mean = llt.solve(x.transpose() * z);
    for (int j = 0; j < d; ++j) xi[j] = rng.normal();
    beta = mean + llt.matrixU().solve(xi);
    if (keep.keep(iter)) out.push_back(beta);
  }
  return out;
}

Eigen::MatrixXd wishart_draw(double df, const Eigen::MatrixXd& scale, RandomEngine& rng) {
  const int d = static_cast<int>(scale.rows());
  if (!(df > d - 1)) {
    throw std::invalid_argument("wishart_draw: need df > d - 1");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("wishart_draw: scale Cholesky failed");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(df - i));
    for (int j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const Eigen::MatrixXd la = llt.matrixL() * a;
  return la * la.transpose();
}

std::vector<Eigen::VectorXd> sample_niw_precision(const NiwSpec& model,
                                                  const DataPartition& partition,
                                                  TemperingMode mode,
                                                  const SamplerConfig& cfg,
                                                  std::uint64_t seed) {
  cfg.validate();
  const int d = static_cast<int>(model.V.rows());

  // Tempering: Wishart(nu, V)^(1/K) = Wishart((nu-d-1)/K + d + 1, K V),
  // read off by matching exponents of det(Lambda) and tr(V^{-1} Lambda).
  double nu_t = model.nu;
  Eigen::MatrixXd v_t = model.V;
  if (mode.kind == TemperingMode::Kind::Subposterior) {
    const double k = static_cast<double>(mode.num_partitions);
    nu_t = (model.nu - d - 1) / k + d + 1;
    v_t = k * model.V;
  }

  const double nu_post = nu_t + partition.size();
  if (!(nu_post > d - 1)) {
    throw std::invalid_argument("niw: posterior degrees of freedom too small");
  }
  Eigen::MatrixXd v_post_inv = v_t.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
  for (int idx : partition.rows()) {
    const Eigen::VectorXd c = model.X.row(idx).transpose() - model.mu;
    v_post_inv.selfadjointView<Eigen::Lower>().rankUpdate(c);
  }
  v_post_inv = Eigen::MatrixXd(v_post_inv.selfadjointView<Eigen::Lower>());
  const Eigen::MatrixXd v_post = v_post_inv.ldlt().solve(Eigen::MatrixXd::Identity(d, d));

  RandomEngine rng(seed);
  std::vector<Eigen::VectorXd> out;
  const int t = cfg.kept_draws();  // draws are independent; burn-in/thinning are no-ops
  out.reserve(t);
  for (int i = 0; i < t; ++i) {
    out.push_back(flatten(wishart_draw(nu_post, v_post, rng)));
  }
  return out;
}

namespace {

struct HmcState {
  Eigen::MatrixXd theta;
  double log_density;
};

// Leapfrog integration of (theta, p) in place.
void leapfrog(const MixtureSpec& model, const DataPartition& partition, TemperingMode mode,
              double eps, int steps, Eigen::MatrixXd& theta, Eigen::MatrixXd& p) {
  Eigen::MatrixXd grad = mixture_partition_grad(model, partition, theta, mode);
  if (!grad.allFinite()) {
    throw std::runtime_error("hmc: non-finite gradient at partition " +
                             std::to_string(partition.index));
  }
  p += 0.5 * eps * grad;
  for (int step = 0; step < steps; ++step) {
    theta += eps * p;
    grad = mixture_partition_grad(model, partition, theta, mode);
    if (!grad.allFinite()) {
      throw std::runtime_error("hmc: non-finite gradient at partition " +
                               std::to_string(partition.index));
    }
    p += (step + 1 == steps ? 0.5 : 1.0) * eps * grad;
  }
}

// One HMC transition; returns true on acceptance.
bool hmc_step(const MixtureSpec& model, const DataPartition& partition, TemperingMode mode,
              double eps, int steps, HmcState& state, RandomEngine& rng) {
  const int l = static_cast<int>(state.theta.rows());
  const int d = static_cast<int>(state.theta.cols());

  Eigen::MatrixXd p(l, d);
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < d; ++j) p(i, j) = rng.normal();
  }
  const double kinetic0 = 0.5 * p.squaredNorm();

  Eigen::MatrixXd theta = state.theta;
  leapfrog(model, partition, mode, eps, steps, theta, p);

  const double log_density1 = mixture_partition_log_density(model, partition, theta, mode);
  const double kinetic1 = 0.5 * p.squaredNorm();
  const double log_accept = (log_density1 - kinetic1) - (state.log_density - kinetic0);
  if (std::log(rng.uniform_pos()) < log_accept) {
    state.theta = std::move(theta);
    state.log_density = log_density1;
    return true;
  }
  return false;
}

}  // namespace

double hmc_energy_error(const MixtureSpec& model, const DataPartition& partition,
                        TemperingMode mode, const Eigen::MatrixXd& theta0,
                        const Eigen::MatrixXd& momentum0, double eps, int steps) {
  Eigen::MatrixXd theta = theta0;
  Eigen::MatrixXd p = momentum0;
  const double h0 = -mixture_partition_log_density(model, partition, theta, mode) +
                    0.5 * p.squaredNorm();
  leapfrog(model, partition, mode, eps, steps, theta, p);
  const double h1 = -mixture_partition_log_density(model, partition, theta, mode) +
                    0.5 * p.squaredNorm();
  return std::abs(h1 - h0);
}

std::vector<Eigen::VectorXd> hmc_mixture(const MixtureSpec& model,
                                         const DataPartition& partition,
                                         TemperingMode mode, const SamplerConfig& cfg,
                                         std::uint64_t seed, double* acceptance_out,
                                         double* tuned_step_out) {
  cfg.validate();
  const int d = static_cast<int>(model.X.cols());

  RandomEngine rng(seed);
  HmcState state;
  state.theta = Eigen::MatrixXd::Zero(model.L, d);  // tempered-prior mean
  state.log_density = mixture_partition_log_density(model, partition, state.theta, mode);

  double eps = cfg.hmc_step_size;
  if (cfg.hmc_auto_tune) {
    // Halve the step size until a 100-step warmup block accepts >= 60%.
    for (int attempt = 0; attempt < 40; ++attempt) {
      int accepted = 0;
      for (int i = 0; i < 100; ++i) {
        accepted += hmc_step(model, partition, mode, eps, cfg.hmc_leapfrog_steps, state, rng);
      }
      if (accepted >= 60) break;
      eps *= 0.5;
    }
  }
  if (tuned_step_out) *tuned_step_out = eps;

  const KeepSchedule keep{cfg.burnin, cfg.thin};
  std::vector<Eigen::VectorXd> out;
  out.reserve(cfg.kept_draws());
  long accepted = 0;
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    accepted += hmc_step(model, partition, mode, eps, cfg.hmc_leapfrog_steps, state, rng);
    if (keep.keep(iter)) out.push_back(flatten(state.theta));
  }
  if (acceptance_out) {
    *acceptance_out = static_cast<double>(accepted) / cfg.iterations;
  }
  return out;
}

namespace {

std::vector<Eigen::VectorXd> sample_partition(const ModelSpec& model,
                                              const DataPartition& partition,
                                              TemperingMode mode, const SamplerConfig& cfg,
                                              std::uint64_t seed, double* acceptance,
                                              double* step) {
  return std::visit(
      [&](const auto& m) -> std::vector<Eigen::VectorXd> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ProbitSpec>) {
          if (acceptance) *acceptance = 1.0;
          std::vector<Eigen::VectorXd> draws = gibbs_probit(m, partition, mode, cfg, seed);
          return draws;
        } else if constexpr (std::is_same_v<T, NiwSpec>) {
          if (acceptance) *acceptance = 1.0;
          return sample_niw_precision(m, partition, mode, cfg, seed);
        } else {
          return hmc_mixture(m, partition, mode, cfg, seed, acceptance, step);
        }
      },
      model);
}

}  // namespace

SubposteriorSampleSet run_parallel(const ModelSpec& model, const PartitionSet& partitions,
                                   TemperingMode mode, const SamplerConfig& cfg,
                                   int threads, SamplerDiagnostics* diagnostics) {
  cfg.validate();
  validate_model(model);
  const int k = partitions.K();

  SubposteriorSampleSet out;
  out.shape = param_shape(model);
  out.mode = mode;
  out.draws.resize(k);
  out.seeds.resize(k);
  for (int i = 0; i < k; ++i) out.seeds[i] = derive_seed(cfg.seed, i);

  std::vector<double> acceptance(k, 1.0), step(k, 0.0);
  std::vector<std::string> errors(k);

  int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, k));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= k) return;
      try {
        out.draws[i] = sample_partition(model, partitions[i], mode, cfg, out.seeds[i],
                                        &acceptance[i], &step[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (int i = 0; i < k; ++i) {
    if (!errors[i].empty()) {
      throw std::runtime_error("partition " + std::to_string(i) + ": " + errors[i]);
    }
  }

  out.truncate_to_common_length();
  if (diagnostics) {
    diagnostics->acceptance_rate = std::move(acceptance);
    diagnostics->hmc_step_size = std::move(step);
  }
  return out;
}

SubposteriorSampleSet sample_serial(const ModelSpec& model, const SamplerConfig& cfg,
                                    SamplerDiagnostics* diagnostics) {
  const int n = data_count(model);
  PartitionSet full;
  full.partitions.resize(1);
  full.partitions[0].index = 0;
  full.partitions[0].row_indices.resize(n);
  for (int i = 0; i < n; ++i) full.partitions[0].row_indices[i] = i;
  return run_parallel(model, full, TemperingMode::subposterior(1), cfg, 1, diagnostics);
}

}  // namespace vcmc
