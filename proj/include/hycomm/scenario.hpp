#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hycomm/geometry.hpp"
#include "hycomm/rng.hpp"

namespace hycomm {

/// Raised when rejection sampling cannot place the requested objects.
struct PlacementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WorldConfig {
  Interval x_range{-100.0, 100.0};
  Interval y_range{-40.0, 40.0};
  int n_objects_min = 30;
  int n_objects_max = 30;
  int n_agents = 3;
  Interval length_range{3.8, 5.2};
  Interval width_range{1.7, 2.1};
  Interval height_range{1.4, 1.8};
  double min_gap = 1.0;
  std::uint64_t seed = 0;
};

struct SensorConfig {
  int n_rays = 720;
  double max_range = 120.0;
  double range_noise_sigma = 0.03;
  /// Expected clutter returns per square meter of free ground, swept only on
  /// rays that hit no object.
  double background_rate = 0.035;
  double z_mount = 1.8;

  bool operator==(const SensorConfig&) const = default;
};

struct WorldObject {
  int id = 0;
  OrientedBox3 box;
};

struct Agent {
  int id = 0;
  PlanarPose pose;
  SensorConfig sensor;
  std::vector<int> neighbors;
};

struct Scenario {
  std::uint64_t seed = 0;
  Rect bounds;
  std::vector<WorldObject> objects;
  std::vector<Agent> agents;

  int agent_index(int agent_id) const;  // throws std::out_of_range when absent
  std::vector<OrientedBox3> object_boxes() const;
};

/// Builds a random world: agent 0 sits at the origin (the evaluation frame),
/// remaining agents and all object footprints are rejection-sampled inside
/// the configured ranges with pairwise footprint gaps >= min_gap. Fails with
/// PlacementError once the shared retry budget (10,000 draws) is exhausted.
/// Deterministic in (cfg, cfg.seed).
Scenario generate_world(const WorldConfig& cfg, const SensorConfig& sensor);

/// Casts n_rays uniform bearings from the agent pose and returns world-frame
/// hits. Each ray yields at most one object-surface point (the nearest edge
/// intersection, range-perturbed by a +-3 sigma truncated Gaussian, z drawn
/// uniformly inside the struck box). Rays that hit nothing sweep free ground
/// and may emit Poisson-distributed background clutter at z = 0.
/// Deterministic in (scenario, agent).
PointCloud simulate_lidar(const Scenario& s, int agent_id);

/// Adds independent zero-mean Gaussian noise to x, y, and yaw; yaw is
/// renormalized into (-pi, pi]. Zero sigmas return the pose unchanged.
PlanarPose perturb_pose(const PlanarPose& p, double sigma_xy, double sigma_yaw, Rng& rng);

/// Re-expresses message contents in the ego frame using the sender's
/// self-reported pose. A wrong believed pose misaligns the output; that is
/// the intended failure mode under pose noise.
PointCloud express_points_in_ego(const PointCloud& pts, const PlanarPose& sender_believed,
                                 const PlanarPose& ego);
std::vector<OrientedBox3> express_boxes_in_ego(const std::vector<OrientedBox3>& boxes,
                                               const PlanarPose& sender_believed,
                                               const PlanarPose& ego);

}  // namespace hycomm
