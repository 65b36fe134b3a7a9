// Command-line driver for data-parallel consensus Monte Carlo experiments:
// sample subposteriors, optimize aggregation weights, aggregate, and evaluate
// against a serial reference chain.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vcmc/config.hpp"
#include "vcmc/experiment.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct GlobalArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  bool force = false;
  bool dry_run = false;
  int threads = 0;
};

vcmc::ExperimentConfig load_config(const GlobalArgs& args) {
  if (args.config_path.empty()) {
    throw vcmc::ConfigError("--config is required");
  }
  vcmc::ExperimentConfig cfg = vcmc::load_experiment_config(args.config_path);
  if (args.seed_set) {
    cfg.seed = args.seed;
    cfg.sampler.seed = args.seed;
  }
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  return cfg;
}

vcmc::RunOptions run_options(const GlobalArgs& args) {
  vcmc::RunOptions options;
  options.force = args.force;
  options.dry_run = args.dry_run;
  options.threads = args.threads;
  return options;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational consensus Monte Carlo experiment driver"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path, "experiment config (.toml or .json)");
  app.add_option("--seed", args.seed, "master seed (overrides the config)")
      ->each([&](const std::string&) { args.seed_set = true; });
  app.add_option("--out", args.out_dir, "output directory (overrides the config)");
  app.add_flag("--force", args.force, "overwrite existing outputs");
  app.add_flag("--dry-run", args.dry_run, "print the stage plan without writing");
  app.add_option("--threads", args.threads, "worker threads (0 = hardware default)");

  bool serial_only = false;
  bool parallel_only = false;
  auto* sample = app.add_subcommand("sample", "draw serial and/or subposterior samples");
  sample->add_flag("--serial", serial_only, "only the serial reference chain");
  sample->add_flag("--parallel", parallel_only, "only the partitioned chains");

  auto* optimize = app.add_subcommand("optimize", "fit aggregation weights per K");
  auto* aggregate = app.add_subcommand("aggregate", "write aggregated sample files per K");
  auto* evaluate = app.add_subcommand("evaluate", "score algorithms against the serial chain");
  auto* pipeline = app.add_subcommand("pipeline", "run sample, optimize, aggregate, evaluate");
  auto* validate = app.add_subcommand("validate", "re-check a finished experiment directory");

  CLI11_PARSE(app, argc, argv);

  try {
    const vcmc::ExperimentConfig cfg = load_config(args);
    vcmc::RunOptions options = run_options(args);

    if (sample->parsed()) {
      if (serial_only != parallel_only) {  // exactly one switch narrows the run
        options.serial = serial_only;
        options.parallel = parallel_only;
      }
      vcmc::cmd_sample(cfg, options);
    } else if (optimize->parsed()) {
      vcmc::cmd_optimize(cfg, options);
    } else if (aggregate->parsed()) {
      vcmc::cmd_aggregate(cfg, options);
    } else if (evaluate->parsed()) {
      vcmc::cmd_evaluate(cfg, options);
    } else if (pipeline->parsed()) {
      vcmc::cmd_pipeline(cfg, options);
    } else if (validate->parsed()) {
      const auto problems = vcmc::cmd_validate(cfg);
      if (!problems.empty()) {
        for (const auto& p : problems) std::cerr << "invalid: " << p << "\n";
        return kExitRuntimeError;
      }
      std::cout << "experiment directory is valid\n";
    }
  } catch (const vcmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return 0;
}
