#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "hycomm/strategies.hpp"

namespace hycomm {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One JSON document fully determines an experiment.
struct ExperimentConfig {
  MatrixConfig matrix;
};

ExperimentConfig default_experiment_config();

/// Parses and validates a config document. Unknown keys, type mismatches,
/// and semantic violations raise ConfigError naming the offending key.
ExperimentConfig parse_experiment_config(const std::string& json_text);

std::string experiment_config_to_json(const ExperimentConfig& cfg);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& json_text);

/// CSV with the stable header
/// strategy,budget_floats,volume_log2_bytes,ap30,ap50,ap70,ap30_sd,ap50_sd,ap70_sd,n_trials,seed
std::string sweep_to_csv(const SweepResult& result);

/// Static trade-off plot: mean volume (log2 bytes) on x, mean AP50 on y, one
/// polyline per strategy.
std::string sweep_to_svg(const SweepResult& result);

/// Runs one (strategy, budget) trial on a scenario fixture and dumps the
/// ego detections before/after fusion plus per-sender message sizes.
std::string replay_to_json(const ExperimentConfig& cfg, const Scenario& scenario,
                           StrategyId strategy, std::uint64_t budget_floats,
                           std::uint64_t run_seed);

}  // namespace hycomm
