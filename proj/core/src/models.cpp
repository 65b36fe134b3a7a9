#include "vcmc/models.hpp"

#include <cmath>
#include <stdexcept>

#include "vcmc/mathutil.hpp"

namespace vcmc {

namespace {

void check_theta_shape(const ModelSpec& model, const Eigen::MatrixXd& theta) {
  const ParamShape shape = param_shape(model);
  if (theta.rows() != shape.rows || theta.cols() != shape.cols) {
    throw std::invalid_argument("theta shape does not match model");
  }
}

// Symmetry check plus log det via LDLT; throws on an asymmetric or
// non-PSD precision argument.
double psd_log_det(const Eigen::MatrixXd& a, const char* what) {
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + a.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(std::string(what) + ": matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-9 * std::max(1.0, std::abs(ev.maxCoeff()))) {
    throw std::invalid_argument(std::string(what) + ": matrix must be PSD");
  }
  double ld = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    ld += std::log(std::max(ev[i], 0.0));  // log 0 = -inf on the PSD boundary
  }
  return ld;
}

double probit_log_prior(const ProbitSpec& m, const Eigen::MatrixXd& theta) {
  const int d = static_cast<int>(m.X.cols());
  const double ss = theta.row(0).squaredNorm();
  return -0.5 * d * (kLog2Pi + std::log(m.sigma2)) - 0.5 * ss / m.sigma2;
}

double niw_log_prior(const NiwSpec& m, const Eigen::MatrixXd& lambda) {
  const int d = static_cast<int>(m.V.rows());
  const double log_det_lambda = psd_log_det(lambda, "niw theta");
  const Eigen::MatrixXd v_inv = m.V.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
  const double trace_term = (v_inv * lambda).trace();
  const double log_det_v = m.V.ldlt().vectorD().array().log().sum();
  return 0.5 * (m.nu - d - 1) * log_det_lambda - 0.5 * trace_term -
         0.5 * m.nu * d * std::log(2.0) - 0.5 * m.nu * log_det_v -
         multivariate_lgamma(d, 0.5 * m.nu);
}

double mixture_log_prior(const MixtureSpec& m, const Eigen::MatrixXd& theta) {
  const int d = static_cast<int>(theta.cols());
  double lp = 0.0;
  for (int l = 0; l < m.L; ++l) {
    lp += -0.5 * d * (kLog2Pi + std::log(m.tau2)) - 0.5 * theta.row(l).squaredNorm() / m.tau2;
  }
  return lp;
}

}  // namespace

ModelKind model_kind(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ProbitSpec>) return ModelKind::Probit;
        if constexpr (std::is_same_v<T, NiwSpec>) return ModelKind::NormalInverseWishart;
        if constexpr (std::is_same_v<T, MixtureSpec>) return ModelKind::GaussianMixture;
      },
      model);
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Probit: return "probit";
    case ModelKind::NormalInverseWishart: return "niw";
    case ModelKind::GaussianMixture: return "mixture";
  }
  throw std::logic_error("unknown model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "probit") return ModelKind::Probit;
  if (name == "niw") return ModelKind::NormalInverseWishart;
  if (name == "mixture") return ModelKind::GaussianMixture;
  throw std::invalid_argument("unknown model kind: " + name);
}

ParamShape param_shape(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> ParamShape {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ProbitSpec>) {
          return {1, static_cast<int>(m.X.cols())};
        } else if constexpr (std::is_same_v<T, NiwSpec>) {
          const int d = static_cast<int>(m.V.rows());
          return {d, d};
        } else {
          return {m.L, static_cast<int>(m.X.cols())};
        }
      },
      model);
}

int data_count(const ModelSpec& model) {
  return std::visit([](const auto& m) { return static_cast<int>(m.X.rows()); }, model);
}

void validate_model(const ModelSpec& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ProbitSpec>) {
          if (m.sigma2 <= 0.0) throw std::invalid_argument("probit: sigma2 must be > 0");
          if (m.X.rows() != m.y.size()) throw std::invalid_argument("probit: X/y row mismatch");
          for (int i = 0; i < m.y.size(); ++i) {
            if (m.y[i] != 0 && m.y[i] != 1) throw std::invalid_argument("probit: labels must be 0/1");
          }
        } else if constexpr (std::is_same_v<T, NiwSpec>) {
          const int d = static_cast<int>(m.V.rows());
          if (m.V.cols() != d) throw std::invalid_argument("niw: V must be square");
          psd_log_det(m.V, "niw V");
          if (!(m.nu > d - 1)) throw std::invalid_argument("niw: need nu > d - 1");
          if (m.mu.size() != d) throw std::invalid_argument("niw: mu dimension mismatch");
          if (m.X.size() > 0 && m.X.cols() != d) throw std::invalid_argument("niw: X column mismatch");
        } else {
          if (m.L < 1) throw std::invalid_argument("mixture: L must be >= 1");
          if (m.tau2 <= 0.0 || m.sigma2 <= 0.0) {
            throw std::invalid_argument("mixture: variances must be > 0");
          }
          if (m.pi.size() != m.L) throw std::invalid_argument("mixture: pi size mismatch");
          if (m.pi.minCoeff() < 0.0 || std::abs(m.pi.sum() - 1.0) > 1e-12) {
            throw std::invalid_argument("mixture: pi must lie on the simplex");
          }
        }
      },
      model);
}

double log_prior(const ModelSpec& model, const Eigen::MatrixXd& theta) {
  check_theta_shape(model, theta);
  return std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ProbitSpec>) return probit_log_prior(m, theta);
        if constexpr (std::is_same_v<T, NiwSpec>) return niw_log_prior(m, theta);
        if constexpr (std::is_same_v<T, MixtureSpec>) return mixture_log_prior(m, theta);
      },
      model);
}

double log_likelihood(const ModelSpec& model, const Eigen::MatrixXd& theta,
                      std::span<const int> rows) {
  check_theta_shape(model, theta);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ProbitSpec>) {
          double ll = 0.0;
          for (int n : rows) {
            const double eta = m.X.row(n).dot(theta.row(0));
            ll += m.y[n] == 1 ? log_normal_cdf(eta) : log_normal_cdf(-eta);
          }
          return ll;
        } else if constexpr (std::is_same_v<T, NiwSpec>) {
          if (rows.empty()) return 0.0;
          const int d = static_cast<int>(m.V.rows());
          const double log_det_lambda = psd_log_det(theta, "niw theta");
          double quad = 0.0;
          for (int n : rows) {
            const Eigen::VectorXd c = m.X.row(n).transpose() - m.mu;
            quad += c.dot(theta * c);
          }
          const double nrows = static_cast<double>(rows.size());
          return 0.5 * nrows * log_det_lambda - 0.5 * quad - 0.5 * nrows * d * kLog2Pi;
        } else {
          const int d = static_cast<int>(m.X.cols());
          const double norm_const = -0.5 * d * (kLog2Pi + std::log(m.sigma2));
          std::vector<double> terms(m.L);
          double ll = 0.0;
          for (int n : rows) {
            for (int l = 0; l < m.L; ++l) {
              const double dist2 = (m.X.row(n) - theta.row(l)).squaredNorm();
              terms[l] = std::log(m.pi[l]) + norm_const - 0.5 * dist2 / m.sigma2;
            }
            ll += log_sum_exp(terms);
          }
          return ll;
        }
      },
      model);
}

double log_likelihood_all(const ModelSpec& model, const Eigen::MatrixXd& theta) {
  std::vector<int> rows(static_cast<std::size_t>(data_count(model)));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  return log_likelihood(model, theta, rows);
}

double log_joint(const ModelSpec& model, const Eigen::MatrixXd& theta) {
  return log_prior(model, theta) + log_likelihood_all(model, theta);
}

double partition_log_density(const ModelSpec& model, const DataPartition& partition,
                             const Eigen::MatrixXd& theta, TemperingMode mode) {
  return mode.prior_exponent() * log_prior(model, theta) +
         log_likelihood(model, theta, partition.rows());
}

double mixture_partition_log_density(const MixtureSpec& model,
                                     const DataPartition& partition,
                                     const Eigen::MatrixXd& theta, TemperingMode mode) {
  const int d = static_cast<int>(model.X.cols());
  const double norm_const = -0.5 * d * (kLog2Pi + std::log(model.sigma2));
  std::vector<double> terms(model.L);
  double ll = 0.0;
  for (int n : partition.rows()) {
    for (int l = 0; l < model.L; ++l) {
      const double dist2 = (model.X.row(n) - theta.row(l)).squaredNorm();
      terms[l] = std::log(model.pi[l]) + norm_const - 0.5 * dist2 / model.sigma2;
    }
    ll += log_sum_exp(terms);
  }
  return ll + mode.prior_exponent() * mixture_log_prior(model, theta);
}

Eigen::MatrixXd mixture_partition_grad(const MixtureSpec& model,
                                       const DataPartition& partition,
                                       const Eigen::MatrixXd& theta,
                                       TemperingMode mode) {
  Eigen::MatrixXd grad = -(mode.prior_exponent() / model.tau2) * theta;
  std::vector<double> logits(model.L);
  for (int n : partition.rows()) {
    for (int l = 0; l < model.L; ++l) {
      const double dist2 = (model.X.row(n) - theta.row(l)).squaredNorm();
      logits[l] = std::log(model.pi[l]) - 0.5 * dist2 / model.sigma2;
    }
    const double lse = log_sum_exp(logits);
    for (int l = 0; l < model.L; ++l) {
      const double resp = std::exp(logits[l] - lse);
      grad.row(l) += resp / model.sigma2 * (model.X.row(n) - theta.row(l));
    }
  }
  return grad;
}

}  // namespace vcmc
