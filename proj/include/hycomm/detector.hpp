#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hycomm/geometry.hpp"
#include "hycomm/rng.hpp"

namespace hycomm {

/// Knobs of the synthetic single-agent detector. It is a noisy oracle: it
/// sees the true boxes but degrades them according to how many returns each
/// one collected, so sparsely observed objects come back inaccurate, rarely,
/// and with honestly large reported variance.
struct DetectorProfile {
  std::string name = "default";
  /// Center noise scale; per-axis error std is sigma0 / sqrt(n).
  double sigma0 = 0.9;
  /// Confidence half-saturation count: c = n / (n + n_half).
  double n_half = 12.0;
  /// Detection probability scale: p = 1 - exp(-n / p_scale).
  double p_scale = 6.0;
  double dim_sigma = 0.08;
  double yaw_sigma = 0.04;
  /// False positives per 1000 m^2 of free ground.
  double fp_rate = 0.12;
  /// Reported-variance multiplier; 1 means calibrated.
  double calib_gamma = 1.0;
  double nms_thresh = 0.15;

  bool operator==(const DetectorProfile&) const = default;
};

struct Detection {
  OrientedBox3 box;
  double c = 0.0;   // confidence in [0, 1]
  double ux = 0.0;  // x center variance, m^2
  double uy = 0.0;  // y center variance, m^2

  bool operator==(const Detection&) const = default;
};

struct DetectionSet {
  std::vector<Detection> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }

  std::vector<double> confidences() const;
  std::vector<OrientedBox3> boxes() const;
  std::vector<std::array<double, 2>> variances() const;

  bool operator==(const DetectionSet&) const = default;
};

/// Number of cloud points inside each box (lateral margin 0.1 m). A point
/// contained in several boxes is credited to the box with the nearest BEV
/// center.
std::vector<int> count_points_per_object(const PointCloud& cloud,
                                         const std::vector<OrientedBox3>& objects);

/// Margin used by count_points_per_object.
inline constexpr double kCountMargin = 0.1;

/// c = n / (n + n_half), clamped to [0.05, 0.99].
double confidence_for_count(int n, const DetectorProfile& p);

/// Per-axis center-error std for an object with n supporting points.
double center_sigma_for_count(int n, const DetectorProfile& p);

/// Synthetic detection pass over one cloud. Every object with n >= 1
/// supporting points is emitted with probability 1 - exp(-n / p_scale); its
/// center is perturbed per axis by N(0, sigma0/sqrt(n)), dims and yaw by
/// their sigmas, and the reported variance is ux = uy = calib_gamma * sigma^2.
/// False positives are drawn Poisson(fp_rate * free_area / 1000) uniformly
/// over `fp_region` with confidence in [0.05, 0.3] and ux = uy = (3 sigma0)^2.
/// The merged list goes through NMS at profile.nms_thresh. Deterministic in
/// (cloud, objects, profile, seed); items come back in descending confidence.
DetectionSet detect(const PointCloud& cloud, const std::vector<OrientedBox3>& objects,
                    const Rect& fp_region, const DetectorProfile& profile,
                    std::uint64_t seed);

/// k named presets differing in sigma0, n_half, and fp_rate, cycling through
/// three base profiles ("sharp", "default", "coarse") when k > 3.
std::vector<DetectorProfile> heterogeneous_profiles(int k);

}  // namespace hycomm
