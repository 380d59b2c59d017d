#include "hycomm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hycomm {

namespace {

constexpr int kPlacementRetryBudget = 10000;
constexpr double kRayMinT = 1e-9;

struct Ray {
  Vec2 origin;
  Vec2 dir;  // unit
};

// Nearest forward intersection parameter of a ray with a segment, or +inf.
double ray_segment_t(const Ray& r, const Vec2& a, const Vec2& b) {
  const double ex = b.x - a.x, ey = b.y - a.y;
  const double denom = r.dir.x * ey - r.dir.y * ex;
  if (std::abs(denom) < 1e-15) return std::numeric_limits<double>::infinity();
  const double ox = a.x - r.origin.x, oy = a.y - r.origin.y;
  const double t = (ox * ey - oy * ex) / denom;
  const double u = (ox * r.dir.y - oy * r.dir.x) / denom;
  if (t > kRayMinT && u >= 0.0 && u <= 1.0) return t;
  return std::numeric_limits<double>::infinity();
}

double ray_box_t(const Ray& r, const OrientedBox3& box) {
  const auto corners = box.footprint();
  double best = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 4; ++e) {
    best = std::min(best, ray_segment_t(r, corners[e], corners[(e + 1) % 4]));
  }
  return best;
}

// Distance along the ray to the point where it leaves `bounds`; 0 when the
// origin is already outside.
double ray_exit_t(const Ray& r, const Rect& bounds) {
  if (!bounds.contains(r.origin.x, r.origin.y)) return 0.0;
  double t_exit = std::numeric_limits<double>::infinity();
  if (r.dir.x > 0.0) t_exit = std::min(t_exit, (bounds.x.hi - r.origin.x) / r.dir.x);
  if (r.dir.x < 0.0) t_exit = std::min(t_exit, (bounds.x.lo - r.origin.x) / r.dir.x);
  if (r.dir.y > 0.0) t_exit = std::min(t_exit, (bounds.y.hi - r.origin.y) / r.dir.y);
  if (r.dir.y < 0.0) t_exit = std::min(t_exit, (bounds.y.lo - r.origin.y) / r.dir.y);
  return std::isfinite(t_exit) ? std::max(t_exit, 0.0) : 0.0;
}

bool footprint_inside_rect(const OrientedBox3& box, const Rect& bounds) {
  for (const Vec2& c : box.footprint()) {
    if (!bounds.contains(c.x, c.y)) return false;
  }
  return true;
}

}  // namespace

int Scenario::agent_index(int agent_id) const {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].id == agent_id) return static_cast<int>(i);
  }
  throw std::out_of_range("scenario has no agent with id " + std::to_string(agent_id));
}

std::vector<OrientedBox3> Scenario::object_boxes() const {
  std::vector<OrientedBox3> out;
  out.reserve(objects.size());
  for (const WorldObject& o : objects) out.push_back(o.box);
  return out;
}

Scenario generate_world(const WorldConfig& cfg, const SensorConfig& sensor) {
  if (cfg.n_agents < 1) throw std::invalid_argument("generate_world: n_agents must be >= 1");
  if (cfg.n_objects_min < 0 || cfg.n_objects_max < cfg.n_objects_min) {
    throw std::invalid_argument("generate_world: bad n_objects range");
  }
  if (cfg.min_gap < 0.0) throw std::invalid_argument("generate_world: min_gap must be >= 0");
  if (cfg.x_range.length() <= 0.0 || cfg.y_range.length() <= 0.0) {
    throw std::invalid_argument("generate_world: world ranges must be non-empty");
  }

  Scenario s;
  s.seed = cfg.seed;
  s.bounds = Rect{cfg.x_range, cfg.y_range};
  Rng rng = make_rng(streams::generation(cfg.seed));

  // Agent 0 is the ego reference at the origin; the rest scatter over a
  // central sub-box so their views overlap the scene from distinct angles.
  s.agents.reserve(static_cast<std::size_t>(cfg.n_agents));
  for (int i = 0; i < cfg.n_agents; ++i) {
    Agent ag;
    ag.id = i;
    ag.sensor = sensor;
    if (i == 0) {
      ag.pose = PlanarPose(0.0, 0.0, 0.0);
    } else {
      const double x = uniform_in(rng, 0.6 * cfg.x_range.lo, 0.6 * cfg.x_range.hi);
      const double y = uniform_in(rng, 0.75 * cfg.y_range.lo, 0.75 * cfg.y_range.hi);
      const double yaw = uniform_in(rng, -kPi, kPi);
      ag.pose = PlanarPose(x, y, yaw);
    }
    s.agents.push_back(std::move(ag));
  }
  for (Agent& ag : s.agents) {
    for (const Agent& other : s.agents) {
      if (other.id != ag.id) ag.neighbors.push_back(other.id);
    }
  }

  const int n_objects =
      cfg.n_objects_min == cfg.n_objects_max
          ? cfg.n_objects_min
          : cfg.n_objects_min +
                static_cast<int>(std::uniform_int_distribution<int>(
                    0, cfg.n_objects_max - cfg.n_objects_min)(rng));

  int retries_left = kPlacementRetryBudget;
  s.objects.reserve(static_cast<std::size_t>(n_objects));
  for (int i = 0; i < n_objects; ++i) {
    bool placed = false;
    while (!placed) {
      if (retries_left-- <= 0) {
        throw PlacementError(
            "generate_world: placement retry budget exhausted; the object "
            "density or min_gap is infeasible for the configured ranges");
      }
      const double l = uniform_in(rng, cfg.length_range.lo, cfg.length_range.hi);
      const double w = uniform_in(rng, cfg.width_range.lo, cfg.width_range.hi);
      const double h = uniform_in(rng, cfg.height_range.lo, cfg.height_range.hi);
      const double cx = uniform_in(rng, cfg.x_range.lo, cfg.x_range.hi);
      const double cy = uniform_in(rng, cfg.y_range.lo, cfg.y_range.hi);
      const double yaw = uniform_in(rng, -kPi, kPi);
      const OrientedBox3 box(cx, cy, 0.5 * h, l, w, h, yaw);

      if (!footprint_inside_rect(box, s.bounds)) continue;
      bool ok = true;
      for (const WorldObject& prev : s.objects) {
        if (footprint_distance(box, prev.box) < cfg.min_gap) {
          ok = false;
          break;
        }
      }
      // Keep sensors out of solid objects.
      for (const Agent& ag : s.agents) {
        if (!ok) break;
        if (footprint_distance_to_point(box, Vec2{ag.pose.x, ag.pose.y}) <
            std::max(cfg.min_gap, 0.5)) {
          ok = false;
        }
      }
      if (!ok) continue;
      s.objects.push_back(WorldObject{i, box});
      placed = true;
    }
  }
  return s;
}

PointCloud simulate_lidar(const Scenario& s, int agent_id) {
  const int idx = s.agent_index(agent_id);
  const Agent& ag = s.agents[static_cast<std::size_t>(idx)];
  const SensorConfig& sc = ag.sensor;
  if (sc.n_rays < 1) throw std::invalid_argument("simulate_lidar: n_rays must be >= 1");
  if (sc.max_range <= 0.0) throw std::invalid_argument("simulate_lidar: max_range must be > 0");
  if (sc.range_noise_sigma < 0.0) {
    throw std::invalid_argument("simulate_lidar: range_noise_sigma must be >= 0");
  }

  Rng rng = make_rng(streams::lidar(s.seed, static_cast<std::uint64_t>(idx)));
  PointCloud cloud;
  cloud.reserve(static_cast<std::size_t>(sc.n_rays));

  for (int k = 0; k < sc.n_rays; ++k) {
    const double bearing = ag.pose.yaw + 2.0 * kPi * k / sc.n_rays;
    const Ray ray{{ag.pose.x, ag.pose.y}, {std::cos(bearing), std::sin(bearing)}};

    double hit_t = std::numeric_limits<double>::infinity();
    const WorldObject* hit = nullptr;
    for (const WorldObject& obj : s.objects) {
      const double t = ray_box_t(ray, obj.box);
      if (t < hit_t) {
        hit_t = t;
        hit = &obj;
      }
    }

    if (hit != nullptr && hit_t <= sc.max_range) {
      double noise = gaussian(rng, sc.range_noise_sigma);
      noise = std::clamp(noise, -3.0 * sc.range_noise_sigma, 3.0 * sc.range_noise_sigma);
      const double d = hit_t + noise;
      const OrientedBox3& box = hit->box;
      const double z = uniform_in(rng, box.cz - 0.5 * box.h, box.cz + 0.5 * box.h);
      cloud.push_back(Point3{ray.origin.x + d * ray.dir.x, ray.origin.y + d * ray.dir.y, z,
                             uniform01(rng)});
      continue;
    }

    if (sc.background_rate > 0.0) {
      const double free = std::min(sc.max_range, ray_exit_t(ray, s.bounds));
      if (free <= 0.0) continue;
      // One ray sweeps a sector of area pi * free^2 / n_rays.
      const double mean = sc.background_rate * kPi * free * free / sc.n_rays;
      const long n_bg = poisson(rng, mean);
      for (long j = 0; j < n_bg; ++j) {
        const double r = free * std::sqrt(uniform01(rng));  // uniform over the sector
        cloud.push_back(Point3{ray.origin.x + r * ray.dir.x, ray.origin.y + r * ray.dir.y,
                               0.0, uniform01(rng)});
      }
    }
  }
  return cloud;
}

PlanarPose perturb_pose(const PlanarPose& p, double sigma_xy, double sigma_yaw, Rng& rng) {
  if (sigma_xy < 0.0 || sigma_yaw < 0.0) {
    throw std::invalid_argument("perturb_pose: sigmas must be >= 0");
  }
  const double dx = gaussian(rng, sigma_xy);
  const double dy = gaussian(rng, sigma_xy);
  const double dyaw = gaussian(rng, sigma_yaw);
  return PlanarPose(p.x + dx, p.y + dy, normalize_angle(p.yaw + dyaw));
}

PointCloud express_points_in_ego(const PointCloud& pts, const PlanarPose& sender_believed,
                                 const PlanarPose& ego) {
  PointCloud out;
  out.reserve(pts.size());
  for (const Point3& p : pts) out.push_back(transform_to_frame(p, sender_believed, ego));
  return out;
}

std::vector<OrientedBox3> express_boxes_in_ego(const std::vector<OrientedBox3>& boxes,
                                               const PlanarPose& sender_believed,
                                               const PlanarPose& ego) {
  std::vector<OrientedBox3> out;
  out.reserve(boxes.size());
  for (const OrientedBox3& b : boxes) {
    out.push_back(transform_box_to_frame(b, sender_believed, ego));
  }
  return out;
}

}  // namespace hycomm
