#include "hycomm/strategies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

namespace hycomm {

namespace {

struct SenderState {
  int agent_index = 0;
  int agent_id = 0;
  PlanarPose true_pose;
  PlanarPose believed_pose;
  PointCloud cloud_local;     // sender frame
  DetectionSet dets_local;    // sender frame
  std::size_t detection_count = 0;
};

// Everything about one (scenario, run_seed) pair that is shared across
// strategies and budgets.
struct TrialContext {
  const Scenario* scenario = nullptr;
  int ego_index = 0;
  PlanarPose ego_pose;
  Rect bounds;
  PointCloud ego_cloud_ego;            // ego frame
  std::vector<OrientedBox3> gt_ego;    // ego frame
  std::vector<SenderState> senders;
  std::uint64_t run_seed = 0;
  const std::vector<DetectorProfile>* profiles = nullptr;

  const DetectorProfile& profile_for(int agent_index) const {
    const auto& ps = *profiles;
    return ps[static_cast<std::size_t>(agent_index) % ps.size()];
  }
};

PointCloud to_frame(const PointCloud& cloud, const PlanarPose& src, const PlanarPose& dst) {
  if (src == dst) return cloud;
  PointCloud out;
  out.reserve(cloud.size());
  for (const Point3& p : cloud) out.push_back(transform_to_frame(p, src, dst));
  return out;
}

DetectionSet detections_to_frame(const DetectionSet& dets, const PlanarPose& src,
                                 const PlanarPose& dst) {
  if (src == dst) return dets;
  DetectionSet out;
  out.items.reserve(dets.size());
  for (const Detection& d : dets.items) {
    out.items.push_back(Detection{transform_box_to_frame(d.box, src, dst), d.c, d.ux, d.uy});
  }
  return out;
}

TrialContext make_context(const Scenario& scenario, int ego_id,
                          const StrategyConfig& cfg,
                          const std::vector<DetectorProfile>& profiles,
                          std::uint64_t run_seed) {
  if (profiles.empty()) {
    throw std::invalid_argument("run_strategy: at least one detector profile is required");
  }
  TrialContext ctx;
  ctx.scenario = &scenario;
  ctx.ego_index = scenario.agent_index(ego_id);
  ctx.ego_pose = scenario.agents[static_cast<std::size_t>(ctx.ego_index)].pose;
  ctx.bounds = scenario.bounds;
  ctx.run_seed = run_seed;
  ctx.profiles = &profiles;

  const PlanarPose world_frame;  // identity
  ctx.ego_cloud_ego = to_frame(simulate_lidar(scenario, ego_id), world_frame, ctx.ego_pose);
  ctx.gt_ego.reserve(scenario.objects.size());
  for (const WorldObject& o : scenario.objects) {
    ctx.gt_ego.push_back(transform_box_to_frame(o.box, world_frame, ctx.ego_pose));
  }

  const Agent& ego = scenario.agents[static_cast<std::size_t>(ctx.ego_index)];
  for (int neighbor_id : ego.neighbors) {
    SenderState s;
    s.agent_index = scenario.agent_index(neighbor_id);
    s.agent_id = neighbor_id;
    s.true_pose = scenario.agents[static_cast<std::size_t>(s.agent_index)].pose;

    const PointCloud cloud_world = simulate_lidar(scenario, neighbor_id);
    const DetectionSet dets_world =
        detect(cloud_world, scenario.object_boxes(), ctx.bounds,
               ctx.profile_for(s.agent_index),
               streams::detect(run_seed, static_cast<std::uint64_t>(s.agent_index)));
    s.cloud_local = to_frame(cloud_world, world_frame, s.true_pose);
    s.dets_local = detections_to_frame(dets_world, world_frame, s.true_pose);
    s.detection_count = s.dets_local.size();

    Rng pose_rng = make_rng(streams::pose(run_seed, static_cast<std::uint64_t>(s.agent_index)));
    s.believed_pose = perturb_pose(s.true_pose, cfg.pose_sigma_xy, cfg.pose_sigma_yaw, pose_rng);
    ctx.senders.push_back(std::move(s));
  }
  return ctx;
}

std::vector<WirePoint> sample_wire_points(const PointCloud& cloud,
                                          const std::vector<double>& weights,
                                          std::size_t b_point, Rng& rng) {
  std::vector<WirePoint> out;
  if (b_point == 0 || cloud.empty()) return out;
  const std::vector<std::size_t> idx = weighted_sample_indices(weights, b_point, rng);
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(to_wire(cloud[i]));
  return out;
}

HybridMessage build_message(const TrialContext& ctx, const SenderState& s, StrategyId id,
                            Budget budget, const StrategyConfig& cfg) {
  if (id == StrategyId::kHeuristicSwitch) {
    const StrategyId mode = budget.floats >= cfg.switch_threshold_floats
                                ? StrategyId::kEarlyRandom
                                : StrategyId::kLateAll;
    return build_message(ctx, s, mode, budget, cfg);
  }

  HybridMessage msg;
  msg.sender_pose = to_wire(s.believed_pose);
  const std::size_t k = s.detection_count;
  Rng pack_rng = make_rng(streams::pack(ctx.run_seed, static_cast<std::uint64_t>(s.agent_index)));

  switch (id) {
    case StrategyId::kNoCollab:
      break;
    case StrategyId::kLateAll: {
      // All-or-nothing legacy policy.
      if (k > 0 && budget.floats >= 7 * static_cast<std::uint64_t>(k)) {
        SelectionMask all;
        all.bits.assign(k, 1);
        msg.boxes = pack_box_message(s.dets_local, all);
      }
      break;
    }
    case StrategyId::kEarlyRandom:
    case StrategyId::kPointOnlyUniform: {
      const std::vector<double> uniform(s.cloud_local.size(), cfg.packer.delta);
      msg.points = sample_wire_points(s.cloud_local, uniform,
                                      static_cast<std::size_t>(budget.floats / 4), pack_rng);
      break;
    }
    case StrategyId::kHycomm: {
      msg = pack_hybrid(s.dets_local, s.cloud_local, budget, cfg.packer, pack_rng,
                        to_wire(s.believed_pose));
      break;
    }
    case StrategyId::kHycommPointOnly: {
      const auto expanded = expand_boxes(s.dets_local, cfg.packer);
      const auto weights = weight_points(s.cloud_local, expanded, s.dets_local, cfg.packer);
      msg.points = sample_wire_points(s.cloud_local, weights,
                                      static_cast<std::size_t>(budget.floats / 4), pack_rng);
      break;
    }
    case StrategyId::kHycommNoExpand: {
      const BudgetSplit split = allocate_budget(budget, k);
      msg.boxes = pack_box_message(s.dets_local,
                                   select_boxes(s.dets_local.confidences(), split.b_box));
      const auto weights =
          weight_points(s.cloud_local, s.dets_local.boxes(), s.dets_local, cfg.packer);
      msg.points = sample_wire_points(s.cloud_local, weights, split.b_point, pack_rng);
      break;
    }
    case StrategyId::kHycommNoReweight: {
      const BudgetSplit split = allocate_budget(budget, k);
      msg.boxes = pack_box_message(s.dets_local,
                                   select_boxes(s.dets_local.confidences(), split.b_box));
      const auto expanded = expand_boxes(s.dets_local, cfg.packer);
      std::vector<double> weights(s.cloud_local.size(), cfg.packer.delta);
      for (std::size_t pi = 0; pi < s.cloud_local.size(); ++pi) {
        for (const OrientedBox3& e : expanded) {
          if (point_in_box(e, s.cloud_local[pi], 0.0)) {
            weights[pi] = 1.0;
            break;
          }
        }
      }
      msg.points = sample_wire_points(s.cloud_local, weights, split.b_point, pack_rng);
      break;
    }
    case StrategyId::kHeuristicSwitch:
      break;  // handled above
  }
  return msg;
}

StrategyOutcome run_with_context(const TrialContext& ctx, StrategyId id, Budget budget,
                                 const StrategyConfig& cfg) {
  StrategyOutcome out;
  const DetectorProfile& ego_profile = ctx.profile_for(ctx.ego_index);
  const std::uint64_t ego_detect_seed =
      streams::detect(ctx.run_seed, static_cast<std::uint64_t>(ctx.ego_index));

  if (id == StrategyId::kNoCollab) {
    out.detections =
        detect(ctx.ego_cloud_ego, ctx.gt_ego, ctx.bounds, ego_profile, ego_detect_seed);
    out.ego_single = out.detections;
    out.volume = volume_from_bytes(0);
    return out;
  }

  std::vector<OrientedBox3> recv_boxes;
  PointCloud recv_points;
  std::uint64_t payload = 0;
  for (const SenderState& s : ctx.senders) {
    HybridMessage msg = build_message(ctx, s, id, budget, cfg);
    payload += msg.payload_bytes();

    const PlanarPose believed = from_wire(msg.sender_pose);
    if (!msg.boxes.empty()) {
      std::vector<OrientedBox3> boxes;
      boxes.reserve(msg.boxes.size());
      for (const WireBox& b : msg.boxes) boxes.push_back(from_wire(b));
      const auto in_ego = express_boxes_in_ego(boxes, believed, ctx.ego_pose);
      recv_boxes.insert(recv_boxes.end(), in_ego.begin(), in_ego.end());
    }
    if (!msg.points.empty()) {
      PointCloud pts;
      pts.reserve(msg.points.size());
      for (const WirePoint& p : msg.points) pts.push_back(from_wire(p));
      const auto in_ego = express_points_in_ego(pts, believed, ctx.ego_pose);
      recv_points.insert(recv_points.end(), in_ego.begin(), in_ego.end());
    }
    out.messages.push_back(SenderTrace{s.agent_id, std::move(msg)});
  }
  out.volume = volume_from_bytes(payload);

  const bool late_only = id == StrategyId::kLateAll ||
                         (id == StrategyId::kHeuristicSwitch &&
                          budget.floats < cfg.switch_threshold_floats);
  const bool early_only = id == StrategyId::kEarlyRandom ||
                          id == StrategyId::kPointOnlyUniform ||
                          (id == StrategyId::kHeuristicSwitch && !late_only);

  if (late_only) {
    out.ego_single =
        detect(ctx.ego_cloud_ego, ctx.gt_ego, ctx.bounds, ego_profile, ego_detect_seed);
    out.detections = fuse_late(out.ego_single, recv_boxes, cfg.fusion);
    return out;
  }

  const DetectionSet redetected = fuse_early(ctx.ego_cloud_ego, recv_points, ctx.gt_ego,
                                             ctx.bounds, ego_profile, ego_detect_seed);
  out.ego_single =
      recv_points.empty()
          ? redetected
          : detect(ctx.ego_cloud_ego, ctx.gt_ego, ctx.bounds, ego_profile, ego_detect_seed);
  out.detections = early_only ? redetected : fuse_late(redetected, recv_boxes, cfg.fusion);
  return out;
}

void accumulate_row(SweepRow& row, const std::vector<TrialRecord>& records) {
  const int n = static_cast<int>(records.size());
  row.n_trials = n;
  if (n == 0) return;
  double s30 = 0, s50 = 0, s70 = 0, sv = 0;
  for (const TrialRecord& r : records) {
    s30 += r.ap.ap30;
    s50 += r.ap.ap50;
    s70 += r.ap.ap70;
    sv += r.volume.log2_bytes;
  }
  row.ap30_mean = s30 / n;
  row.ap50_mean = s50 / n;
  row.ap70_mean = s70 / n;
  row.volume_log2_mean = sv / n;
  if (n > 1) {
    double v30 = 0, v50 = 0, v70 = 0;
    for (const TrialRecord& r : records) {
      v30 += (r.ap.ap30 - row.ap30_mean) * (r.ap.ap30 - row.ap30_mean);
      v50 += (r.ap.ap50 - row.ap50_mean) * (r.ap.ap50 - row.ap50_mean);
      v70 += (r.ap.ap70 - row.ap70_mean) * (r.ap.ap70 - row.ap70_mean);
    }
    row.ap30_sd = std::sqrt(v30 / (n - 1));
    row.ap50_sd = std::sqrt(v50 / (n - 1));
    row.ap70_sd = std::sqrt(v70 / (n - 1));
  }
}

}  // namespace

std::string_view to_string(StrategyId id) {
  switch (id) {
    case StrategyId::kNoCollab: return "no_collab";
    case StrategyId::kLateAll: return "late_all";
    case StrategyId::kEarlyRandom: return "early_random";
    case StrategyId::kHeuristicSwitch: return "heuristic_switch";
    case StrategyId::kHycomm: return "hycomm";
    case StrategyId::kHycommPointOnly: return "hycomm_point_only";
    case StrategyId::kPointOnlyUniform: return "point_only_uniform";
    case StrategyId::kHycommNoExpand: return "hycomm_no_expand";
    case StrategyId::kHycommNoReweight: return "hycomm_no_reweight";
  }
  return "unknown";
}

std::optional<StrategyId> strategy_from_string(std::string_view name) {
  for (StrategyId id : kAllStrategies) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

StrategyOutcome run_strategy(StrategyId id, const Scenario& scenario, int ego_id,
                             Budget budget, const StrategyConfig& cfg,
                             const std::vector<DetectorProfile>& profiles,
                             std::uint64_t run_seed) {
  const TrialContext ctx = make_context(scenario, ego_id, cfg, profiles, run_seed);
  return run_with_context(ctx, id, budget, cfg);
}

SweepResult run_trial_matrix(const MatrixConfig& cfg, int jobs) {
  if (cfg.n_trials < 1) throw std::invalid_argument("run_trial_matrix: n_trials must be >= 1");
  if (cfg.strategies.empty()) {
    throw std::invalid_argument("run_trial_matrix: at least one strategy is required");
  }
  if (cfg.budgets_floats.empty()) {
    throw std::invalid_argument("run_trial_matrix: at least one budget is required");
  }

  const std::vector<DetectorProfile> profiles =
      cfg.hetero ? heterogeneous_profiles(3) : cfg.profiles;

  const std::size_t n_strategies = cfg.strategies.size();
  const std::size_t n_budgets = cfg.budgets_floats.size();
  SweepResult result;
  result.trials.assign(n_strategies,
                       std::vector<std::vector<TrialRecord>>(
                           n_budgets, std::vector<TrialRecord>(
                                          static_cast<std::size_t>(cfg.n_trials))));

  const auto run_trial = [&](int trial) {
    const std::uint64_t world_seed =
        streams::world(cfg.master_seed, static_cast<std::uint64_t>(trial));
    WorldConfig wc = cfg.world;
    wc.seed = world_seed;
    const Scenario scenario = generate_world(wc, cfg.sensor);
    const TrialContext ctx =
        make_context(scenario, cfg.ego_id, cfg.strategy, profiles, world_seed);
    const std::vector<OrientedBox3> gt = ctx.gt_ego;

    for (std::size_t si = 0; si < n_strategies; ++si) {
      for (std::size_t bi = 0; bi < n_budgets; ++bi) {
        const StrategyOutcome outcome = run_with_context(
            ctx, cfg.strategies[si], Budget{cfg.budgets_floats[bi]}, cfg.strategy);
        TrialRecord rec;
        rec.ap = evaluate(outcome.detections, gt);
        rec.volume = outcome.volume;
        result.trials[si][bi][static_cast<std::size_t>(trial)] = rec;
      }
    }
  };

  const int workers = std::max(1, std::min(jobs, cfg.n_trials));
  if (workers == 1) {
    for (int t = 0; t < cfg.n_trials; ++t) run_trial(t);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const int t = next.fetch_add(1);
          if (t >= cfg.n_trials) return;
          try {
            run_trial(t);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  result.rows.reserve(n_strategies * n_budgets);
  for (std::size_t si = 0; si < n_strategies; ++si) {
    for (std::size_t bi = 0; bi < n_budgets; ++bi) {
      SweepRow row;
      row.strategy = cfg.strategies[si];
      row.budget_floats = cfg.budgets_floats[bi];
      row.master_seed = cfg.master_seed;
      accumulate_row(row, result.trials[si][bi]);
      result.rows.push_back(row);
    }
  }
  return result;
}

}  // namespace hycomm
