#pragma once

#include <string>
#include <vector>

#include "vcmc/config.hpp"

namespace vcmc {

struct RunOptions {
  bool force = false;
  bool dry_run = false;
  int threads = 0;  // 0 = hardware default
  bool serial = true;
  bool parallel = true;
};

/// Stage entry points backing the CLI subcommands. All of them work inside
/// config.output_dir, write files atomically, and keep manifest.json current.
/// Outputs are a pure function of (config, seed); --threads only changes
/// wall time.
void cmd_sample(const ExperimentConfig& config, const RunOptions& options);
void cmd_optimize(const ExperimentConfig& config, const RunOptions& options);
void cmd_aggregate(const ExperimentConfig& config, const RunOptions& options);
void cmd_evaluate(const ExperimentConfig& config, const RunOptions& options);
void cmd_pipeline(const ExperimentConfig& config, const RunOptions& options);

/// Re-checks a finished experiment directory against the documented schemas;
/// returns human-readable problems (empty = valid).
std::vector<std::string> cmd_validate(const ExperimentConfig& config);

/// Directory layout helpers.
std::string serial_dir(const ExperimentConfig& config);
std::string partition_dir(const ExperimentConfig& config, int k);
std::string weights_file(const ExperimentConfig& config, int k, const std::string& algorithm);
std::string report_file(const ExperimentConfig& config, int k, const std::string& algorithm,
                        const std::string& suite);

/// Serial sampler settings: same schedule with the kept-draw count scaled by
/// serial_draw_multiplier.
SamplerConfig serial_sampler_config(const ExperimentConfig& config);

}  // namespace vcmc
