#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace hycomm {

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Axis-aligned ground-plane rectangle.
struct Rect {
  Interval x;
  Interval y;

  double area() const { return x.length() * y.length(); }
  bool contains(double px, double py) const { return x.contains(px) && y.contains(py); }
  bool operator==(const Rect&) const = default;
};

/// Ground-plane pose. yaw is normalized into (-pi, pi] at construction.
struct PlanarPose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  PlanarPose() = default;
  PlanarPose(double x_, double y_, double yaw_);

  bool is_identity() const { return x == 0.0 && y == 0.0 && yaw == 0.0; }
  bool operator==(const PlanarPose&) const = default;
};

/// One sensor return: position in meters plus intensity in [0, 1].
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  bool operator==(const Point3&) const = default;
};

using PointCloud = std::vector<Point3>;

/// Yaw-rotated 3D box on the ground plane. Length runs along the heading,
/// width across it. Construction normalizes yaw into (-pi, pi] and rejects
/// non-positive or non-finite dimensions.
struct OrientedBox3 {
  double cx = 0.0, cy = 0.0, cz = 0.0;
  double l = 1.0, w = 1.0, h = 1.0;
  double yaw = 0.0;

  OrientedBox3() = default;
  OrientedBox3(double cx_, double cy_, double cz_, double l_, double w_, double h_,
               double yaw_);

  /// BEV footprint corners in counter-clockwise order.
  std::array<Vec2, 4> footprint() const;
  double footprint_area() const { return l * w; }

  bool operator==(const OrientedBox3&) const = default;
};

/// Re-expresses a point given in `src` coordinates in `dst` coordinates.
Point3 transform_to_frame(const Point3& p, const PlanarPose& src, const PlanarPose& dst);

/// Re-expresses a box given in `src` coordinates in `dst` coordinates.
OrientedBox3 transform_box_to_frame(const OrientedBox3& b, const PlanarPose& src,
                                    const PlanarPose& dst);

/// True iff p falls inside b grown laterally by `margin` on every side.
/// The vertical test is exact: cz - h/2 <= p.z <= cz + h/2.
bool point_in_box(const OrientedBox3& b, const Point3& p, double margin = 0.0);

/// Intersection-over-union of the two BEV footprints, in [0, 1].
/// Intersection areas below 1e-12 m^2 count as zero.
double rotated_iou_bev(const OrientedBox3& a, const OrientedBox3& b);

/// Greedy non-maximum suppression over BEV footprints. Boxes are visited in
/// descending score order (ties: lower index first); a box is kept iff its
/// IoU with every previously kept box is <= iou_thresh. Returns kept indices
/// in visit order.
std::vector<std::size_t> nms(const std::vector<OrientedBox3>& boxes,
                             const std::vector<double>& scores, double iou_thresh);

/// Minimum BEV distance between two box footprints; 0 when they touch or
/// overlap.
double footprint_distance(const OrientedBox3& a, const OrientedBox3& b);

/// Minimum BEV distance from a ground point to a box footprint; 0 inside.
double footprint_distance_to_point(const OrientedBox3& b, const Vec2& p);

}  // namespace hycomm
