#include "hycomm/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hycomm {

namespace {

constexpr double kMinDimension = 0.05;
constexpr double kConfidenceFloor = 0.05;
constexpr double kConfidenceCeil = 0.99;
// Footprint sampling ranges for hallucinated boxes; car-like, matching the
// default world population.
constexpr Interval kFpLength{3.5, 5.5};
constexpr Interval kFpWidth{1.6, 2.2};
constexpr Interval kFpHeight{1.4, 1.9};

void validate(const DetectorProfile& p) {
  if (p.sigma0 < 0.0 || p.n_half < 0.0 || p.p_scale < 0.0 || p.dim_sigma < 0.0 ||
      p.yaw_sigma < 0.0 || p.fp_rate < 0.0) {
    throw std::invalid_argument("DetectorProfile: scales must be >= 0");
  }
  if (p.calib_gamma <= 0.0) {
    throw std::invalid_argument("DetectorProfile: calib_gamma must be > 0");
  }
  if (!(p.nms_thresh > 0.0 && p.nms_thresh < 1.0)) {
    throw std::invalid_argument("DetectorProfile: nms_thresh must lie in (0, 1)");
  }
}

}  // namespace

std::vector<double> DetectionSet::confidences() const {
  std::vector<double> out;
  out.reserve(items.size());
  for (const Detection& d : items) out.push_back(d.c);
  return out;
}

std::vector<OrientedBox3> DetectionSet::boxes() const {
  std::vector<OrientedBox3> out;
  out.reserve(items.size());
  for (const Detection& d : items) out.push_back(d.box);
  return out;
}

std::vector<std::array<double, 2>> DetectionSet::variances() const {
  std::vector<std::array<double, 2>> out;
  out.reserve(items.size());
  for (const Detection& d : items) out.push_back({d.ux, d.uy});
  return out;
}

std::vector<int> count_points_per_object(const PointCloud& cloud,
                                         const std::vector<OrientedBox3>& objects) {
  std::vector<int> counts(objects.size(), 0);
  if (objects.empty()) return counts;

  // Cheap radius prefilter before the exact rotated test.
  std::vector<double> reach(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    reach[i] = 0.5 * std::hypot(objects[i].l, objects[i].w) + kCountMargin;
  }

  for (const Point3& p : cloud) {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const OrientedBox3& b = objects[i];
      const double dx = p.x - b.cx;
      const double dy = p.y - b.cy;
      const double d2 = dx * dx + dy * dy;
      if (d2 > reach[i] * reach[i]) continue;
      if (!point_in_box(b, p, kCountMargin)) continue;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = static_cast<int>(i);
      }
    }
    if (best >= 0) ++counts[static_cast<std::size_t>(best)];
  }
  return counts;
}

double confidence_for_count(int n, const DetectorProfile& p) {
  const double denom = n + p.n_half;
  const double c = denom > 0.0 ? n / denom : 1.0;
  return std::clamp(c, kConfidenceFloor, kConfidenceCeil);
}

double center_sigma_for_count(int n, const DetectorProfile& p) {
  return n > 0 ? p.sigma0 / std::sqrt(static_cast<double>(n)) : std::numeric_limits<double>::infinity();
}

DetectionSet detect(const PointCloud& cloud, const std::vector<OrientedBox3>& objects,
                    const Rect& fp_region, const DetectorProfile& profile,
                    std::uint64_t seed) {
  validate(profile);

  const std::vector<int> counts = count_points_per_object(cloud, objects);

  std::vector<Detection> raw;
  raw.reserve(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const int n = counts[i];
    if (n < 1) continue;

    // Each object owns a substream keyed by its index, so enriching the
    // cloud moves an object's detection only through its own count: the
    // emission flip is monotone in n and the error draw merely rescales.
    Rng rng = make_rng(derive_seed(seed, "obj", i));
    const double p_emit =
        profile.p_scale > 0.0 ? 1.0 - std::exp(-n / profile.p_scale) : 1.0;
    if (uniform01(rng) >= p_emit) continue;

    const OrientedBox3& gt = objects[i];
    const double sigma = center_sigma_for_count(n, profile);
    const double cx = gt.cx + gaussian(rng, sigma);
    const double cy = gt.cy + gaussian(rng, sigma);
    const double cz = gt.cz + gaussian(rng, sigma);
    const double l = std::max(gt.l + gaussian(rng, profile.dim_sigma), kMinDimension);
    const double w = std::max(gt.w + gaussian(rng, profile.dim_sigma), kMinDimension);
    const double h = std::max(gt.h + gaussian(rng, profile.dim_sigma), kMinDimension);
    const double yaw = gt.yaw + gaussian(rng, profile.yaw_sigma);

    Detection d;
    d.box = OrientedBox3(cx, cy, cz, l, w, h, yaw);
    d.c = confidence_for_count(n, profile);
    d.ux = d.uy = profile.calib_gamma * sigma * sigma;
    raw.push_back(d);
  }

  // Hallucinations on free ground, on their own substream.
  Rng rng = make_rng(derive_seed(seed, "fp"));
  double free_area = fp_region.area();
  for (const OrientedBox3& b : objects) free_area -= b.footprint_area();
  free_area = std::max(free_area, 0.0);
  const long n_fp = poisson(rng, profile.fp_rate * free_area / 1000.0);
  for (long f = 0; f < n_fp; ++f) {
    double cx = 0.0, cy = 0.0;
    for (int attempt = 0; attempt < 100; ++attempt) {
      cx = uniform_in(rng, fp_region.x.lo, fp_region.x.hi);
      cy = uniform_in(rng, fp_region.y.lo, fp_region.y.hi);
      bool clear = true;
      for (const OrientedBox3& b : objects) {
        if (point_in_box(b, Point3{cx, cy, b.cz, 0.0}, 0.0)) {
          clear = false;
          break;
        }
      }
      if (clear) break;
    }
    const double l = uniform_in(rng, kFpLength.lo, kFpLength.hi);
    const double w = uniform_in(rng, kFpWidth.lo, kFpWidth.hi);
    const double h = uniform_in(rng, kFpHeight.lo, kFpHeight.hi);
    const double yaw = uniform_in(rng, -kPi, kPi);

    Detection d;
    d.box = OrientedBox3(cx, cy, 0.5 * h, l, w, h, yaw);
    d.c = uniform_in(rng, 0.05, 0.3);
    d.ux = d.uy = 9.0 * profile.sigma0 * profile.sigma0;
    raw.push_back(d);
  }

  std::vector<OrientedBox3> boxes;
  std::vector<double> scores;
  boxes.reserve(raw.size());
  scores.reserve(raw.size());
  for (const Detection& d : raw) {
    boxes.push_back(d.box);
    scores.push_back(d.c);
  }

  DetectionSet out;
  for (std::size_t idx : nms(boxes, scores, profile.nms_thresh)) {
    out.items.push_back(raw[idx]);
  }
  return out;
}

std::vector<DetectorProfile> heterogeneous_profiles(int k) {
  if (k < 1) throw std::invalid_argument("heterogeneous_profiles: k must be >= 1");

  DetectorProfile base;  // the documented default

  DetectorProfile sharp = base;
  sharp.name = "sharp";
  sharp.sigma0 = 0.5;
  sharp.n_half = 8.0;
  sharp.fp_rate = 0.06;

  DetectorProfile coarse = base;
  coarse.name = "coarse";
  coarse.sigma0 = 1.3;
  coarse.n_half = 18.0;
  coarse.fp_rate = 0.2;

  const std::array<DetectorProfile, 3> presets{base, sharp, coarse};
  std::vector<DetectorProfile> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(presets[static_cast<std::size_t>(i) % 3]);
  return out;
}

}  // namespace hycomm
