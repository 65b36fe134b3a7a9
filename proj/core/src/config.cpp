#include "vcmc/config.hpp"

#include <filesystem>

#include <nlohmann/json.hpp>

#include "vcmc/synthetic.hpp"
#include "vcmc/toml_lite.hpp"

namespace vcmc {

using nlohmann::json;

namespace {

const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  try {
    return v->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, const char* key, const char* where) {
  const json* v = find(j, key);
  if (!v) throw ConfigError(std::string("config: missing field '") + key + "' in " + where);
  try {
    return v->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

Eigen::VectorXd to_vector(const json& j, const char* key) {
  const auto vals = j.get<std::vector<double>>();
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  if (v.size() == 0) throw ConfigError(std::string("config field '") + key + "': empty list");
  return v;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& j, const std::string& base_dir) {
  ExperimentConfig cfg;
  cfg.schema = require<std::string>(j, "schema", "top level");
  if (cfg.schema != kConfigSchema) {
    throw ConfigError("config: unsupported schema '" + cfg.schema + "', expected '" +
                      kConfigSchema + "'");
  }
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);

  const json* model = find(j, "model");
  if (!model || !model->is_object()) throw ConfigError("config: missing [model] table");
  cfg.model.kind = model_kind_from_name(require<std::string>(*model, "kind", "[model]"));
  if (const json* data = find(*model, "data")) {
    std::filesystem::path p = data->get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    if (!std::filesystem::exists(p)) {
      throw ConfigError("config: data file does not exist: " + p.string());
    }
    cfg.model.data_path = p.string();
  }
  cfg.model.sigma2 = get_or<double>(*model, "sigma2", 1.0);
  cfg.model.nu = get_or<double>(*model, "nu", 0.0);
  cfg.model.v_scale = get_or<double>(*model, "v_scale", 1.0);
  cfg.model.num_clusters = get_or<int>(*model, "clusters", 1);
  cfg.model.tau2 = get_or<double>(*model, "tau2", 1.0);
  if (const json* mu = find(*model, "mu")) cfg.model.mu = to_vector(*mu, "mu");
  if (const json* pi = find(*model, "pi")) cfg.model.pi = to_vector(*pi, "pi");

  if (const json* synth = find(*model, "synthetic")) {
    cfg.model.synthetic_seed = get_or<std::uint64_t>(*synth, "seed", 1);
    cfg.model.n = require<int>(*synth, "n", "[model.synthetic]");
    cfg.model.d = require<int>(*synth, "d", "[model.synthetic]");
    cfg.model.beta_scale = get_or<double>(*synth, "beta_scale", 1.0);
  } else if (!cfg.model.data_path) {
    throw ConfigError("config: [model] needs either data or a [model.synthetic] table");
  }

  const json* partitions = find(j, "partitions");
  if (!partitions) throw ConfigError("config: missing [partitions] table");
  cfg.partition_counts = require<std::vector<int>>(*partitions, "counts", "[partitions]");
  if (cfg.partition_counts.empty()) {
    throw ConfigError("config: [partitions].counts must be nonempty");
  }
  for (int k : cfg.partition_counts) {
    if (k < 1) throw ConfigError("config: every partition count must be >= 1");
  }
  const std::string mode = get_or<std::string>(*partitions, "mode", "subposterior");
  if (mode == "subposterior") {
    cfg.tempering = TemperingMode::Kind::Subposterior;
  } else if (mode == "partial") {
    cfg.tempering = TemperingMode::Kind::PartialPosterior;
  } else {
    throw ConfigError("config: unknown tempering mode '" + mode + "'");
  }

  if (const json* sampler = find(j, "sampler")) {
    cfg.sampler.iterations = get_or<int>(*sampler, "iterations", cfg.sampler.iterations);
    cfg.sampler.burnin = get_or<int>(*sampler, "burnin", cfg.sampler.burnin);
    cfg.sampler.thin = get_or<int>(*sampler, "thin", cfg.sampler.thin);
    cfg.sampler.hmc_step_size = get_or<double>(*sampler, "hmc_step_size", cfg.sampler.hmc_step_size);
    cfg.sampler.hmc_leapfrog_steps =
        get_or<int>(*sampler, "hmc_leapfrog_steps", cfg.sampler.hmc_leapfrog_steps);
    cfg.sampler.hmc_auto_tune = get_or<bool>(*sampler, "hmc_auto_tune", true);
    cfg.serial_draw_multiplier = get_or<int>(*sampler, "serial_draw_multiplier", 10);
  }
  cfg.sampler.seed = cfg.seed;
  try {
    cfg.sampler.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: [sampler]: ") + e.what());
  }
  if (cfg.serial_draw_multiplier < 1) {
    throw ConfigError("config: serial_draw_multiplier must be >= 1");
  }

  if (const json* objective = find(j, "objective")) {
    if (const json* entropy = find(*objective, "entropy")) {
      cfg.objective.entropy = entropy_mode_from_name(entropy->get<std::string>());
    }
    cfg.objective.batch_size = get_or<int>(*objective, "batch_size", cfg.objective.batch_size);
    cfg.objective.iterations = get_or<int>(*objective, "iterations", cfg.objective.iterations);
    cfg.objective.step_a = get_or<double>(*objective, "step_a", cfg.objective.step_a);
    cfg.objective.step_b = get_or<double>(*objective, "step_b", cfg.objective.step_b);
    cfg.objective.weight_floor =
        get_or<double>(*objective, "weight_floor", cfg.objective.weight_floor);
  }
  try {
    cfg.objective.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: [objective]: ") + e.what());
  }

  const json* evaluation = find(j, "evaluation");
  if (evaluation) {
    if (const json* suites = find(*evaluation, "suites")) {
      for (const auto& s : *suites) {
        cfg.evaluation.suites.push_back(suite_kind_from_name(s.get<std::string>()));
      }
    }
    if (const json* algos = find(*evaluation, "algorithms")) {
      cfg.evaluation.algorithms = algos->get<std::vector<std::string>>();
    }
    cfg.evaluation.comembership_points =
        get_or<int>(*evaluation, "comembership_points", cfg.evaluation.comembership_points);
    cfg.evaluation.comembership_seed =
        get_or<std::uint64_t>(*evaluation, "comembership_seed", cfg.evaluation.comembership_seed);
    cfg.evaluation.trim_comembership =
        get_or<double>(*evaluation, "trim_comembership", cfg.evaluation.trim_comembership);
  }
  if (cfg.evaluation.suites.empty()) {
    switch (cfg.model.kind) {
      case ModelKind::Probit:
        cfg.evaluation.suites = {SuiteKind::FirstMoments, SuiteKind::PureSecondMoments,
                                 SuiteKind::MixedSecondMoments};
        break;
      case ModelKind::NormalInverseWishart:
        cfg.evaluation.suites = {SuiteKind::Eigenvalues, SuiteKind::EigenvaluePairs};
        break;
      case ModelKind::GaussianMixture:
        cfg.evaluation.suites = {SuiteKind::Comembership};
        break;
    }
  }
  for (const auto& algo : cfg.evaluation.algorithms) {
    if (algo != "uniform_cmc" && algo != "gaussian_cmc" && algo != "vcmc") {
      throw ConfigError("config: unknown algorithm '" + algo + "'");
    }
  }
  if (!(cfg.evaluation.trim_comembership > 0.0 && cfg.evaluation.trim_comembership <= 1.0)) {
    throw ConfigError("config: trim_comembership must lie in (0, 1]");
  }

  if (const json* output = find(j, "output")) {
    cfg.output_dir = get_or<std::string>(*output, "directory", cfg.output_dir);
    cfg.format = sample_file_format_from_name(get_or<std::string>(*output, "format", "binary"));
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("config file does not exist: " + path);
  }
  const std::string text = read_file(path);
  const std::string base_dir = std::filesystem::path(path).parent_path().string();
  json j;
  if (std::filesystem::path(path).extension() == ".json") {
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config json: ") + e.what());
    }
  } else {
    j = parse_toml_lite(text);  // throws with line diagnostics
  }
  return parse_experiment_config(j, base_dir);
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema"] = cfg.schema;
  j["seed"] = cfg.seed;

  json model;
  model["kind"] = model_kind_name(cfg.model.kind);
  if (cfg.model.data_path) model["data"] = *cfg.model.data_path;
  model["sigma2"] = cfg.model.sigma2;
  model["nu"] = cfg.model.nu;
  model["v_scale"] = cfg.model.v_scale;
  model["clusters"] = cfg.model.num_clusters;
  model["tau2"] = cfg.model.tau2;
  if (cfg.model.mu) {
    model["mu"] = std::vector<double>(cfg.model.mu->data(), cfg.model.mu->data() + cfg.model.mu->size());
  }
  if (cfg.model.pi) {
    model["pi"] = std::vector<double>(cfg.model.pi->data(), cfg.model.pi->data() + cfg.model.pi->size());
  }
  if (!cfg.model.data_path) {
    json synth;
    synth["seed"] = cfg.model.synthetic_seed;
    synth["n"] = cfg.model.n;
    synth["d"] = cfg.model.d;
    synth["beta_scale"] = cfg.model.beta_scale;
    model["synthetic"] = synth;
  }
  j["model"] = model;

  json partitions;
  partitions["counts"] = cfg.partition_counts;
  partitions["mode"] =
      cfg.tempering == TemperingMode::Kind::Subposterior ? "subposterior" : "partial";
  j["partitions"] = partitions;

  json sampler;
  sampler["iterations"] = cfg.sampler.iterations;
  sampler["burnin"] = cfg.sampler.burnin;
  sampler["thin"] = cfg.sampler.thin;
  sampler["hmc_step_size"] = cfg.sampler.hmc_step_size;
  sampler["hmc_leapfrog_steps"] = cfg.sampler.hmc_leapfrog_steps;
  sampler["hmc_auto_tune"] = cfg.sampler.hmc_auto_tune;
  sampler["serial_draw_multiplier"] = cfg.serial_draw_multiplier;
  j["sampler"] = sampler;

  json objective;
  objective["entropy"] = entropy_mode_name(cfg.objective.entropy);
  objective["batch_size"] = cfg.objective.batch_size;
  objective["iterations"] = cfg.objective.iterations;
  objective["step_a"] = cfg.objective.step_a;
  objective["step_b"] = cfg.objective.step_b;
  objective["weight_floor"] = cfg.objective.weight_floor;
  j["objective"] = objective;

  json evaluation;
  std::vector<std::string> suites;
  for (SuiteKind s : cfg.evaluation.suites) suites.push_back(suite_kind_name(s));
  evaluation["suites"] = suites;
  evaluation["algorithms"] = cfg.evaluation.algorithms;
  evaluation["comembership_points"] = cfg.evaluation.comembership_points;
  evaluation["comembership_seed"] = cfg.evaluation.comembership_seed;
  evaluation["trim_comembership"] = cfg.evaluation.trim_comembership;
  j["evaluation"] = evaluation;

  json output;
  output["directory"] = cfg.output_dir;
  output["format"] = sample_file_format_name(cfg.format);
  j["output"] = output;
  return j;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = config_to_json(cfg).dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

ModelSpec build_model(const ModelConfig& config) {
  if (config.data_path) {
    const CsvTable table = load_csv_table(*config.data_path);
    switch (config.kind) {
      case ModelKind::Probit: {
        const int y_col = table.column_index("y");
        if (y_col < 0) throw ConfigError("probit data: missing label column 'y'");
        ProbitSpec model;
        model.sigma2 = config.sigma2;
        const int d = static_cast<int>(table.columns.size()) - 1;
        if (d < 1) throw ConfigError("probit data: no feature columns");
        model.X.resize(table.values.rows(), d);
        model.y.resize(table.values.rows());
        for (int i = 0; i < table.values.rows(); ++i) {
          int c = 0;
          for (int jcol = 0; jcol < table.values.cols(); ++jcol) {
            if (jcol == y_col) {
              model.y[i] = static_cast<int>(table.values(i, jcol));
            } else {
              model.X(i, c++) = table.values(i, jcol);
            }
          }
        }
        validate_model(model);
        return model;
      }
      case ModelKind::NormalInverseWishart: {
        NiwSpec model;
        const int d = static_cast<int>(table.values.cols());
        model.X = table.values;
        model.nu = config.nu > 0.0 ? config.nu : d + 2;
        model.V = config.v_scale * Eigen::MatrixXd::Identity(d, d);
        model.mu = config.mu ? *config.mu : Eigen::VectorXd(model.X.colwise().mean());
        validate_model(model);
        return model;
      }
      case ModelKind::GaussianMixture: {
        MixtureSpec model;
        model.L = config.num_clusters;
        model.tau2 = config.tau2;
        model.sigma2 = config.sigma2;
        model.pi = config.pi ? *config.pi
                             : Eigen::VectorXd::Constant(config.num_clusters,
                                                         1.0 / config.num_clusters);
        model.X = table.values;
        validate_model(model);
        return model;
      }
    }
    throw std::logic_error("unknown model kind");
  }

  if (config.n < 1 || config.d < 1) {
    throw ConfigError("config: [model.synthetic] needs n >= 1 and d >= 1");
  }
  switch (config.kind) {
    case ModelKind::Probit: {
      ProbitGeneratorConfig gen;
      gen.n = config.n;
      gen.d = config.d;
      gen.sigma2 = config.sigma2;
      gen.beta_scale = config.beta_scale;
      return generate_probit(gen, config.synthetic_seed);
    }
    case ModelKind::NormalInverseWishart: {
      NiwGeneratorConfig gen;
      gen.n = config.n;
      gen.d = config.d;
      gen.nu = config.nu;
      gen.v_scale = config.v_scale;
      NiwSpec model = generate_niw(gen, config.synthetic_seed);
      if (config.mu) model.mu = *config.mu;
      validate_model(model);
      return model;
    }
    case ModelKind::GaussianMixture: {
      MixtureGeneratorConfig gen;
      gen.n = config.n;
      gen.d = config.d;
      gen.num_clusters = config.num_clusters;
      gen.tau2 = config.tau2;
      gen.sigma2 = config.sigma2;
      return generate_mixture(gen, config.synthetic_seed);
    }
  }
  throw std::logic_error("unknown model kind");
}

}  // namespace vcmc
