#include "vcmc/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include <nlohmann/json.hpp>

#include "vcmc/aggregation.hpp"
#include "vcmc/partition.hpp"
#include "vcmc/rng.hpp"
#include "vcmc/synthetic.hpp"

namespace vcmc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string manifest_path(const ExperimentConfig& cfg) {
  return cfg.output_dir + "/manifest.json";
}

json load_manifest(const ExperimentConfig& cfg) {
  const std::string path = manifest_path(cfg);
  if (!fs::exists(path)) {
    json m;
    m["schema"] = "vcmc-manifest/1";
    m["config_hash"] = config_hash(cfg);
    m["seed"] = cfg.seed;
    m["stages"] = json::object();
    m["timings"] = json::object();
    return m;
  }
  return json::parse(read_file(path));
}

void store_manifest(const ExperimentConfig& cfg, const json& manifest) {
  write_file_atomic(manifest_path(cfg), manifest.dump(2) + "\n");
}

void ensure_output_dir(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  write_file_atomic(cfg.output_dir + "/config.json", config_to_json(cfg).dump(2) + "\n");
}

void refuse_overwrite(const std::string& path, bool force) {
  if (!force && fs::exists(path)) {
    throw std::runtime_error("refusing to overwrite " + path + " (rerun with --force)");
  }
}

std::string weights_algorithm_tag(const std::string& algorithm) {
  if (algorithm == "uniform_cmc") return "uniform";
  if (algorithm == "gaussian_cmc") return "gaussian";
  if (algorithm == "vcmc") return "vcmc";
  throw std::invalid_argument("unknown algorithm: " + algorithm);
}

WeightFamily family_for(ModelKind kind) {
  switch (kind) {
    case ModelKind::Probit: return WeightFamily::Vector;
    case ModelKind::NormalInverseWishart: return WeightFamily::Spectral;
    case ModelKind::GaussianMixture: return WeightFamily::Combinatorial;
  }
  throw std::logic_error("unknown model kind");
}

int weight_dim(const ModelSpec& model) {
  const ParamShape shape = param_shape(model);
  switch (family_for(model_kind(model))) {
    case WeightFamily::Vector: return shape.size();
    case WeightFamily::Spectral: return shape.rows;
    case WeightFamily::Combinatorial: return shape.cols;
  }
  throw std::logic_error("unknown weight family");
}

/// Baseline and optimized weights for one K; mixture alignment is computed
/// once and shared.
WeightSet make_weights(const std::string& algorithm, const ModelSpec& model,
                       SubposteriorSampleSet& samples, const ExperimentConfig& cfg,
                       const Alignment* alignment, OptimizerTrace* trace_out) {
  const ModelKind kind = model_kind(model);
  const WeightFamily family = family_for(kind);
  const int L = kind == ModelKind::GaussianMixture ? std::get<MixtureSpec>(model).L : 1;

  if (algorithm == "uniform_cmc") {
    WeightSet w = uniform_weights(samples.K(), weight_dim(model), family, L);
    if (family == WeightFamily::Combinatorial) w.alignment = *alignment;
    return w;
  }
  if (algorithm == "gaussian_cmc") {
    return gaussian_weights(samples, family, alignment);
  }
  OptimizeResult result = optimize(model, samples, cfg.objective, cfg.seed, alignment);
  if (result.aborted) {
    throw std::runtime_error("vcmc optimization aborted: " + result.abort_reason);
  }
  if (trace_out) *trace_out = std::move(result.trace);
  return std::move(result.weights);
}

Eigen::MatrixXd comembership_points(const ExperimentConfig& cfg, const ModelSpec& model) {
  const auto& mix = std::get<MixtureSpec>(model);
  const int n_points = cfg.evaluation.comembership_points;
  if (cfg.model.data_path) {
    // Observed data: subsample rows with the dedicated seed.
    RandomEngine rng(cfg.evaluation.comembership_seed);
    Eigen::MatrixXd points(n_points, mix.X.cols());
    for (int i = 0; i < n_points; ++i) {
      points.row(i) = mix.X.row(static_cast<int>(rng.uniform_below(mix.X.rows())));
    }
    return points;
  }
  // Synthetic data: fresh draws from the same generator settings.
  MixtureGeneratorConfig gen;
  gen.n = n_points;
  gen.d = static_cast<int>(mix.X.cols());
  gen.num_clusters = mix.L;
  gen.tau2 = mix.tau2;
  gen.sigma2 = mix.sigma2;
  return generate_mixture(gen, cfg.evaluation.comembership_seed).X;
}

TestFunctionSuite make_suite(SuiteKind kind, const ExperimentConfig& cfg,
                             const ModelSpec& model) {
  TestFunctionSuite suite;
  suite.kind = kind;
  const ParamShape shape = param_shape(model);
  switch (kind) {
    case SuiteKind::FirstMoments:
    case SuiteKind::PureSecondMoments:
    case SuiteKind::MixedSecondMoments:
      suite.dim = shape.size();
      break;
    case SuiteKind::Eigenvalues:
    case SuiteKind::EigenvaluePairs:
      if (shape.rows != shape.cols) {
        throw std::runtime_error("eigenvalue suites need a square parameter");
      }
      suite.dim = shape.rows;
      break;
    case SuiteKind::Comembership:
      suite.test_points = comembership_points(cfg, model);
      suite.sigma2 = std::get<MixtureSpec>(model).sigma2;
      break;
  }
  return suite;
}

struct PlanPrinter {
  bool dry_run;
  bool executed = false;

  /// In dry-run mode prints the step and returns false (skip execution).
  bool step(const std::string& description) {
    if (dry_run) {
      std::cout << "[plan] " << description << "\n";
      return false;
    }
    executed = true;
    return true;
  }
};

}  // namespace

std::string serial_dir(const ExperimentConfig& cfg) { return cfg.output_dir + "/serial"; }

std::string partition_dir(const ExperimentConfig& cfg, int k) {
  return cfg.output_dir + "/K" + std::to_string(k);
}

std::string weights_file(const ExperimentConfig& cfg, int k, const std::string& algorithm) {
  return partition_dir(cfg, k) + "/weights_" + weights_algorithm_tag(algorithm) + ".json";
}

std::string report_file(const ExperimentConfig& cfg, int k, const std::string& algorithm,
                        const std::string& suite) {
  return partition_dir(cfg, k) + "/report_" + weights_algorithm_tag(algorithm) + "_" + suite +
         ".json";
}

SamplerConfig serial_sampler_config(const ExperimentConfig& cfg) {
  SamplerConfig serial = cfg.sampler;
  serial.iterations =
      cfg.sampler.burnin +
      cfg.serial_draw_multiplier * (cfg.sampler.iterations - cfg.sampler.burnin);
  return serial;
}

void cmd_sample(const ExperimentConfig& cfg, const RunOptions& options) {
  PlanPrinter plan{options.dry_run};
  const ModelSpec model = build_model(cfg.model);
  validate_model(model);
  const int n = data_count(model);

  json manifest;
  if (!options.dry_run) {
    ensure_output_dir(cfg);
    manifest = load_manifest(cfg);
  }

  if (options.serial) {
    const std::string dir = serial_dir(cfg);
    if (plan.step("sample serial reference -> " + dir)) {
      refuse_overwrite(dir + "/" + sample_file_name(0, cfg.format), options.force);
      const auto start = std::chrono::steady_clock::now();
      SamplerDiagnostics diag;
      const SamplerConfig serial_cfg = serial_sampler_config(cfg);
      const SubposteriorSampleSet samples = sample_serial(model, serial_cfg, &diag);
      write_sample_set(dir, cfg.model.kind, samples, cfg.format);
      manifest["stages"]["sample_serial"] = {{"T", samples.T()},
                                             {"seeds", samples.seeds},
                                             {"acceptance", diag.acceptance_rate}};
      manifest["timings"]["sampling_serial"] = seconds_since(start);
    }
  }

  if (options.parallel) {
    for (int k : cfg.partition_counts) {
      const std::string dir = partition_dir(cfg, k);
      if (!plan.step("sample K=" + std::to_string(k) + " subposteriors -> " + dir)) continue;
      refuse_overwrite(dir + "/" + sample_file_name(0, cfg.format), options.force);
      const auto start = std::chrono::steady_clock::now();
      const PartitionSet partitions = partition_data(n, k, cfg.seed);
      SamplerDiagnostics diag;
      const SubposteriorSampleSet samples =
          run_parallel(model, partitions, cfg.mode_for(k), cfg.sampler, options.threads, &diag);
      write_sample_set(dir, cfg.model.kind, samples, cfg.format);
      manifest["stages"]["sample_K" + std::to_string(k)] = {
          {"T", samples.T()}, {"seeds", samples.seeds}, {"acceptance", diag.acceptance_rate}};
      manifest["timings"]["sampling_K" + std::to_string(k)] = seconds_since(start);
    }
  }

  if (!options.dry_run) store_manifest(cfg, manifest);
}

void cmd_optimize(const ExperimentConfig& cfg, const RunOptions& options) {
  PlanPrinter plan{options.dry_run};
  const ModelSpec model = build_model(cfg.model);
  const ModelKind kind = model_kind(model);

  json manifest;
  if (!options.dry_run) manifest = load_manifest(cfg);

  for (int k : cfg.partition_counts) {
    const std::string dir = partition_dir(cfg, k);
    if (!plan.step("optimize weights for K=" + std::to_string(k) + " -> " + dir)) continue;

    SubposteriorSampleSet samples = read_sample_set(dir, k, cfg.format);
    if (!(samples.shape == param_shape(model))) {
      throw std::runtime_error("optimize: sample shape does not match the model in " + dir);
    }
    const auto start = std::chrono::steady_clock::now();

    Alignment alignment;
    const Alignment* align = nullptr;
    if (kind == ModelKind::GaussianMixture) {
      alignment = align_clusters(samples, std::get<MixtureSpec>(model).L);
      align = &alignment;
    }

    for (const auto& algorithm : cfg.evaluation.algorithms) {
      const std::string path = weights_file(cfg, k, algorithm);
      refuse_overwrite(path, options.force);
      OptimizerTrace trace;
      const WeightSet weights = make_weights(algorithm, model, samples, cfg, align, &trace);
      validate_weights(weights, cfg.objective.weight_floor);
      write_file_atomic(path, weights_to_json(weights) + "\n");
      if (algorithm == "vcmc") {
        write_file_atomic(dir + "/trace_vcmc.csv", trace.to_csv());
      }
    }
    manifest["timings"]["optimize_K" + std::to_string(k)] = seconds_since(start);
  }
  if (!options.dry_run) store_manifest(cfg, manifest);
}

void cmd_aggregate(const ExperimentConfig& cfg, const RunOptions& options) {
  PlanPrinter plan{options.dry_run};
  json manifest;
  if (!options.dry_run) manifest = load_manifest(cfg);

  for (int k : cfg.partition_counts) {
    const std::string dir = partition_dir(cfg, k);
    if (!plan.step("aggregate K=" + std::to_string(k) + " samples -> " + dir)) continue;
    ModelKind kind;
    const SubposteriorSampleSet samples = read_sample_set(dir, k, cfg.format, &kind);
    const auto start = std::chrono::steady_clock::now();
    for (const auto& algorithm : cfg.evaluation.algorithms) {
      const WeightSet weights = weights_from_json(read_file(weights_file(cfg, k, algorithm)));
      const AggregatedSampleSet agg = aggregate(weights, samples);
      const std::string path =
          dir + "/aggregated_" + weights_algorithm_tag(algorithm) +
          (cfg.format == SampleFileFormat::Binary ? ".bin" : ".csv");
      refuse_overwrite(path, options.force);
      SampleFileHeader header;
      header.model = kind;
      header.shape = agg.shape;
      header.num_partitions = 1;
      header.partition = 0;
      header.draw_count = agg.draws.size();
      header.seed = cfg.seed;
      header.mode = samples.mode;
      write_sample_file(path, header, agg.draws, cfg.format);
    }
    manifest["timings"]["aggregate_K" + std::to_string(k)] = seconds_since(start);
  }
  if (!options.dry_run) store_manifest(cfg, manifest);
}

void cmd_evaluate(const ExperimentConfig& cfg, const RunOptions& options) {
  PlanPrinter plan{options.dry_run};
  const ModelSpec model = build_model(cfg.model);

  json manifest;
  if (!options.dry_run) manifest = load_manifest(cfg);

  if (options.dry_run) {
    plan.step("evaluate all algorithms against the serial reference");
    return;
  }

  if (!fs::exists(serial_dir(cfg) + "/" + sample_file_name(0, cfg.format))) {
    throw std::runtime_error("evaluate: missing serial reference samples in " +
                             serial_dir(cfg));
  }
  const SubposteriorSampleSet serial = read_sample_set(serial_dir(cfg), 1, cfg.format);
  const auto start = std::chrono::steady_clock::now();

  // Reference expectations per suite.
  std::vector<TestFunctionSuite> suites;
  std::vector<std::vector<double>> references;
  for (SuiteKind kind : cfg.evaluation.suites) {
    suites.push_back(make_suite(kind, cfg, model));
    references.push_back(estimate_expectations(serial.draws[0], serial.shape, suites.back()));
  }

  // comparison_<suite>.csv rows: K, one median column per algorithm.
  std::map<std::string, std::string> comparison;
  for (std::size_t s = 0; s < suites.size(); ++s) {
    std::string header = "K";
    for (const auto& algorithm : cfg.evaluation.algorithms) header += "," + algorithm;
    comparison[suite_kind_name(suites[s].kind)] = header + "\n";
  }

  for (int k : cfg.partition_counts) {
    const std::string dir = partition_dir(cfg, k);
    const SubposteriorSampleSet samples = read_sample_set(dir, k, cfg.format);

    // Aggregated draws per algorithm (recomputed here; cmd_aggregate persists
    // them for external consumers but is not a prerequisite).
    std::map<std::string, AggregatedSampleSet> aggregated;
    for (const auto& algorithm : cfg.evaluation.algorithms) {
      const WeightSet weights = weights_from_json(read_file(weights_file(cfg, k, algorithm)));
      aggregated[algorithm] = aggregate(weights, samples);
    }

    for (std::size_t s = 0; s < suites.size(); ++s) {
      const TestFunctionSuite& suite = suites[s];
      const std::string suite_name = suite_kind_name(suite.kind);
      const auto names = suite.function_names();

      std::map<std::string, std::vector<std::optional<double>>> errors_by_algorithm;
      std::map<std::string, std::vector<double>> estimates_by_algorithm;
      for (const auto& algorithm : cfg.evaluation.algorithms) {
        const auto estimates =
            estimate_expectations(aggregated[algorithm].draws, samples.shape, suite);
        std::vector<std::optional<double>> errors(estimates.size());
        for (std::size_t f = 0; f < estimates.size(); ++f) {
          errors[f] = relative_error(estimates[f], references[s][f]);
        }
        estimates_by_algorithm[algorithm] = estimates;
        errors_by_algorithm[algorithm] = std::move(errors);
      }

      // Optional joint trimming for comembership suites.
      std::vector<int> retained;
      if (suite.kind == SuiteKind::Comembership && cfg.evaluation.trim_comembership < 1.0) {
        retained = trim_jointly(errors_by_algorithm, cfg.evaluation.trim_comembership);
      }

      std::map<std::string, double> medians;
      for (const auto& algorithm : cfg.evaluation.algorithms) {
        const auto& errors = errors_by_algorithm[algorithm];
        std::vector<std::optional<double>> kept;
        if (retained.empty()) {
          kept = errors;
        } else {
          for (int idx : retained) kept.push_back(errors[idx]);
        }
        const EvaluationReport report = summarize(kept, algorithm, suite_name);
        medians[algorithm] = report.median;
        write_file_atomic(report_file(cfg, k, algorithm, suite_name), report.to_json() + "\n");
        write_file_atomic(dir + "/errors_" + weights_algorithm_tag(algorithm) + "_" +
                              suite_name + ".csv",
                          errors_to_csv(names, estimates_by_algorithm[algorithm],
                                        references[s], errors));
      }

      std::string row = std::to_string(k);
      char buf[32];
      for (const auto& algorithm : cfg.evaluation.algorithms) {
        std::snprintf(buf, sizeof(buf), ",%.17g", medians[algorithm]);
        row += buf;
      }
      comparison[suite_name] += row + "\n";
    }
  }

  for (const auto& [suite_name, text] : comparison) {
    write_file_atomic(cfg.output_dir + "/comparison_" + suite_name + ".csv", text);
  }
  manifest["timings"]["evaluation"] = seconds_since(start);
  store_manifest(cfg, manifest);
}

void cmd_pipeline(const ExperimentConfig& cfg, const RunOptions& options) {
  if (!options.dry_run && !options.force && fs::exists(manifest_path(cfg))) {
    throw std::runtime_error("output directory already holds an experiment: " +
                             cfg.output_dir + " (rerun with --force)");
  }
  cmd_sample(cfg, options);
  cmd_optimize(cfg, options);
  cmd_aggregate(cfg, options);
  cmd_evaluate(cfg, options);
}

std::vector<std::string> cmd_validate(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  auto check = [&](bool ok, const std::string& message) {
    if (!ok) problems.push_back(message);
  };

  check(fs::exists(manifest_path(cfg)), "missing manifest.json");
  if (!problems.empty()) return problems;

  try {
    const json manifest = json::parse(read_file(manifest_path(cfg)));
    check(manifest.value("schema", "") == "vcmc-manifest/1", "manifest schema mismatch");
    check(manifest.value("config_hash", std::uint64_t{0}) == config_hash(cfg),
          "manifest config hash differs from the supplied config");
  } catch (const std::exception& e) {
    problems.push_back(std::string("manifest unreadable: ") + e.what());
    return problems;
  }

  for (int k : cfg.partition_counts) {
    const std::string dir = partition_dir(cfg, k);
    try {
      const SubposteriorSampleSet samples = read_sample_set(dir, k, cfg.format);
      check(samples.T() > 0, dir + ": empty sample lists");
    } catch (const std::exception& e) {
      problems.push_back(dir + ": " + e.what());
      continue;
    }
    for (const auto& algorithm : cfg.evaluation.algorithms) {
      const std::string wpath = weights_file(cfg, k, algorithm);
      if (!fs::exists(wpath)) {
        problems.push_back("missing " + wpath);
        continue;
      }
      try {
        validate_weights(weights_from_json(read_file(wpath)), cfg.objective.weight_floor);
      } catch (const std::exception& e) {
        problems.push_back(wpath + ": " + e.what());
      }
      for (SuiteKind kind : cfg.evaluation.suites) {
        const std::string rpath = report_file(cfg, k, algorithm, suite_kind_name(kind));
        if (!fs::exists(rpath)) {
          problems.push_back("missing " + rpath);
          continue;
        }
        try {
          const json r = json::parse(read_file(rpath));
          check(r.contains("median") && r.contains("q1") && r.contains("q3") &&
                    r.contains("n_functions") && r.contains("n_excluded"),
                rpath + ": missing report fields");
          if (r.contains("q1") && r.contains("q3") && r.contains("median")) {
            const double q1 = r["q1"], med = r["median"], q3 = r["q3"];
            check(q1 <= med && med <= q3, rpath + ": quartiles out of order");
          }
        } catch (const std::exception& e) {
          problems.push_back(rpath + ": " + e.what());
        }
      }
    }
  }
  for (SuiteKind kind : cfg.evaluation.suites) {
    const std::string cpath =
        cfg.output_dir + "/comparison_" + suite_kind_name(kind) + ".csv";
    check(fs::exists(cpath), "missing " + cpath);
  }
  return problems;
}

}  // namespace vcmc
