#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "hycomm/detector.hpp"
#include "hycomm/evaluation.hpp"
#include "hycomm/fusion.hpp"
#include "hycomm/messaging.hpp"
#include "hycomm/scenario.hpp"

namespace hycomm {

enum class StrategyId {
  kNoCollab,
  kLateAll,
  kEarlyRandom,
  kHeuristicSwitch,
  kHycomm,
  kHycommPointOnly,
  kPointOnlyUniform,
  kHycommNoExpand,
  kHycommNoReweight,
};

inline constexpr std::array<StrategyId, 9> kAllStrategies{
    StrategyId::kNoCollab,         StrategyId::kLateAll,
    StrategyId::kEarlyRandom,      StrategyId::kHeuristicSwitch,
    StrategyId::kHycomm,           StrategyId::kHycommPointOnly,
    StrategyId::kPointOnlyUniform, StrategyId::kHycommNoExpand,
    StrategyId::kHycommNoReweight,
};

std::string_view to_string(StrategyId id);
std::optional<StrategyId> strategy_from_string(std::string_view name);

/// Shared strategy knobs. pose sigmas apply to collaborators' self-reported
/// poses only; the ego pose is the trusted evaluation frame.
struct StrategyConfig {
  PackerConfig packer;
  FusionConfig fusion;
  /// early_random takes over from late_all at this budget (floats); the
  /// default is the cost of 500 points.
  std::uint64_t switch_threshold_floats = 2000;
  double pose_sigma_xy = 0.0;
  double pose_sigma_yaw = 0.0;
};

struct SenderTrace {
  int sender_id = 0;
  HybridMessage message;
};

struct StrategyOutcome {
  DetectionSet detections;  // final output, ego frame
  VolumeReport volume;      // payload received by the ego this round
  DetectionSet ego_single;  // ego's pre-fusion single-agent detections
  std::vector<SenderTrace> messages;
};

/// Runs one strategy for one ego on one scenario. Every neighbor packs one
/// message under the same per-link budget; the ego fuses what it receives
/// and the result is evaluated in the ego frame.
///
/// All randomness derives from `run_seed` through named sub-streams keyed by
/// agent index but never by strategy or budget, so calls that share a seed
/// share worlds, sensor draws, detector draws, and pose noise; differences
/// between strategies on one seed are attributable to the strategy alone.
StrategyOutcome run_strategy(StrategyId id, const Scenario& scenario, int ego_id,
                             Budget budget, const StrategyConfig& cfg,
                             const std::vector<DetectorProfile>& profiles,
                             std::uint64_t run_seed);

struct TrialRecord {
  ApResult ap;
  VolumeReport volume;
};

struct SweepRow {
  StrategyId strategy = StrategyId::kNoCollab;
  std::uint64_t budget_floats = 0;
  double volume_log2_mean = 0.0;
  double ap30_mean = 0.0, ap50_mean = 0.0, ap70_mean = 0.0;
  double ap30_sd = 0.0, ap50_sd = 0.0, ap70_sd = 0.0;
  int n_trials = 0;
  std::uint64_t master_seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // strategy-major in config order, then budget
  /// trials[strategy_index][budget_index][trial] for paired analyses.
  std::vector<std::vector<std::vector<TrialRecord>>> trials;
};

struct MatrixConfig {
  WorldConfig world;
  SensorConfig sensor;
  std::vector<DetectorProfile> profiles{DetectorProfile{}};
  bool hetero = false;  // replaces `profiles` with heterogeneous_profiles(3)
  StrategyConfig strategy;
  std::vector<StrategyId> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  std::vector<std::uint64_t> budgets_floats{50, 200, 800, 3200, 12800};
  int n_trials = 200;
  std::uint64_t master_seed = 20260810;
  int ego_id = 0;
};

/// Paired sweep: trial t draws world seed(master, t), shared across every
/// (strategy, budget) cell, and run_strategy receives that world seed, so
/// per-trial differences between cells are paired. Trials may run on a
/// worker pool; output is canonicalized so `jobs` never changes the result.
SweepResult run_trial_matrix(const MatrixConfig& cfg, int jobs = 1);

}  // namespace hycomm
