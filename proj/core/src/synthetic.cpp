#include "vcmc/synthetic.hpp"

#include <stdexcept>

#include "vcmc/rng.hpp"
#include "vcmc/samplers.hpp"

namespace vcmc {

ProbitSpec generate_probit(const ProbitGeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.n < 0 || cfg.d < 1) throw std::invalid_argument("probit generator: bad shape");
  RandomEngine rng(seed);

  ProbitSpec model;
  model.sigma2 = cfg.sigma2;
  model.X.resize(cfg.n, cfg.d);
  model.y.resize(cfg.n);

  Eigen::VectorXd beta(cfg.d);
  if (cfg.beta_true) {
    if (cfg.beta_true->size() != cfg.d) {
      throw std::invalid_argument("probit generator: beta_true dimension mismatch");
    }
    beta = *cfg.beta_true;
  } else {
    for (int j = 0; j < cfg.d; ++j) beta[j] = rng.normal(0.0, cfg.beta_scale);
  }

  for (int i = 0; i < cfg.n; ++i) {
    for (int j = 0; j < cfg.d; ++j) model.X(i, j) = rng.normal();
    const double z = model.X.row(i).dot(beta) + rng.normal();
    model.y[i] = z > 0.0 ? 1 : 0;
  }
  return model;
}

NiwSpec generate_niw(const NiwGeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.n < 0 || cfg.d < 1) throw std::invalid_argument("niw generator: bad shape");
  RandomEngine rng(seed);

  NiwSpec model;
  model.nu = cfg.nu > 0.0 ? cfg.nu : cfg.d + 2;
  model.V = cfg.v_scale * Eigen::MatrixXd::Identity(cfg.d, cfg.d);

  const Eigen::MatrixXd lambda_true = wishart_draw(model.nu, model.V, rng);
  // Draw X ~ N(0, Lambda^{-1}) via the Cholesky of the precision.
  const Eigen::LLT<Eigen::MatrixXd> llt(lambda_true);
  model.X.resize(cfg.n, cfg.d);
  Eigen::VectorXd xi(cfg.d);
  for (int i = 0; i < cfg.n; ++i) {
    for (int j = 0; j < cfg.d; ++j) xi[j] = rng.normal();
    model.X.row(i) = llt.matrixU().solve(xi).transpose();
  }
  // The likelihood mean is point-estimated as the overall data mean.
  model.mu = cfg.n > 0 ? Eigen::VectorXd(model.X.colwise().mean())
                       : Eigen::VectorXd::Zero(cfg.d);
  return model;
}

MixtureSpec generate_mixture(const MixtureGeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.n < 0 || cfg.d < 1 || cfg.num_clusters < 1) {
    throw std::invalid_argument("mixture generator: bad shape");
  }
  RandomEngine rng(seed);

  MixtureSpec model;
  model.L = cfg.num_clusters;
  model.tau2 = cfg.tau2;
  model.sigma2 = cfg.sigma2;
  model.pi = Eigen::VectorXd::Constant(cfg.num_clusters, 1.0 / cfg.num_clusters);

  Eigen::MatrixXd centers(cfg.num_clusters, cfg.d);
  for (int l = 0; l < cfg.num_clusters; ++l) {
    for (int j = 0; j < cfg.d; ++j) centers(l, j) = rng.normal(0.0, std::sqrt(cfg.tau2));
  }

  model.X.resize(cfg.n, cfg.d);
  const double sd = std::sqrt(cfg.sigma2);
  for (int i = 0; i < cfg.n; ++i) {
    const auto z = static_cast<int>(rng.uniform_below(cfg.num_clusters));
    for (int j = 0; j < cfg.d; ++j) model.X(i, j) = centers(z, j) + rng.normal(0.0, sd);
  }
  return model;
}

}  // namespace vcmc
