#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vcmc/evaluation.hpp"
#include "vcmc/models.hpp"
#include "vcmc/sample_io.hpp"
#include "vcmc/samplers.hpp"
#include "vcmc/variational.hpp"

namespace vcmc {

/// Configuration problems (bad schema, missing paths, invalid fields) are
/// reported separately from runtime failures so the CLI can map them to
/// distinct exit codes.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr const char* kConfigSchema = "vcmc-experiment/1";

struct ModelConfig {
  ModelKind kind = ModelKind::Probit;
  std::optional<std::string> data_path;  // CSV; otherwise synthetic

  // Shared hyperparameters (interpreted per model kind).
  double sigma2 = 1.0;   // probit prior variance / mixture likelihood variance
  double nu = 0.0;       // niw degrees of freedom; 0 -> d + 2
  double v_scale = 1.0;  // niw scale matrix V = v_scale * I
  std::optional<Eigen::VectorXd> mu;  // niw point-estimated mean; default data mean
  int num_clusters = 1;  // mixture L
  double tau2 = 1.0;     // mixture prior variance
  std::optional<Eigen::VectorXd> pi;  // mixture weights; default uniform

  // Synthetic generator (used when data_path is absent).
  std::uint64_t synthetic_seed = 1;
  int n = 0;
  int d = 0;
  double beta_scale = 1.0;  // probit generator
};

struct EvaluationConfig {
  std::vector<SuiteKind> suites;
  std::vector<std::string> algorithms{"uniform_cmc", "gaussian_cmc", "vcmc"};
  int comembership_points = 50;
  std::uint64_t comembership_seed = 1;
  double trim_comembership = 1.0;  // keep-fraction; 1.0 disables trimming
};

struct ExperimentConfig {
  std::string schema;
  std::uint64_t seed = 0;
  ModelConfig model;
  std::vector<int> partition_counts;
  TemperingMode::Kind tempering = TemperingMode::Kind::Subposterior;
  SamplerConfig sampler;
  int serial_draw_multiplier = 10;
  ObjectiveConfig objective;
  EvaluationConfig evaluation;
  std::string output_dir = "out";
  SampleFileFormat format = SampleFileFormat::Binary;

  TemperingMode mode_for(int k) const {
    return tempering == TemperingMode::Kind::Subposterior ? TemperingMode::subposterior(k)
                                                          : TemperingMode::partial_posterior();
  }
};

/// Parse a config from its JSON form; `base_dir` anchors relative data paths.
ExperimentConfig parse_experiment_config(const nlohmann::json& j, const std::string& base_dir);

/// Load TOML (default) or JSON, chosen by file extension.
ExperimentConfig load_experiment_config(const std::string& path);

/// Canonical JSON mirror: parsing it back yields the same configuration.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// FNV-1a hash of the canonical mirror, recorded in manifests.
std::uint64_t config_hash(const ExperimentConfig& config);

/// Instantiate the model: load the CSV (labels column `y` for probit) or run
/// the seeded synthetic generator.
ModelSpec build_model(const ModelConfig& config);

}  // namespace vcmc
