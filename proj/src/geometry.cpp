#include "hycomm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hycomm {

namespace {

constexpr double kAreaEps = 1e-12;

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double shoelace_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

// Clips a polygon against the half-plane left of the directed edge a->b.
// Vertices exactly on the edge count as inside, so clipping a polygon
// against its own edges reproduces it bit-for-bit.
std::vector<Vec2> clip_half_plane(const std::vector<Vec2>& subject, const Vec2& a,
                                  const Vec2& b) {
  std::vector<Vec2> out;
  out.reserve(subject.size() + 1);
  const std::size_t n = subject.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& cur = subject[i];
    const Vec2& nxt = subject[(i + 1) % n];
    const double dc = cross(a, b, cur);
    const double dn = cross(a, b, nxt);
    if (dc >= 0.0) out.push_back(cur);
    if ((dc >= 0.0) != (dn >= 0.0)) {
      const double t = dc / (dc - dn);
      out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  return out;
}

// Area of footprint(a) clipped by footprint(b), plus the shoelace areas of
// both footprints so the caller can form an exactly consistent union.
struct ClipResult {
  double inter = 0.0;
  double area_a = 0.0;
  double area_b = 0.0;
};

ClipResult clip_footprints(const OrientedBox3& a, const OrientedBox3& b) {
  const auto ca = a.footprint();
  const auto cb = b.footprint();
  std::vector<Vec2> poly(ca.begin(), ca.end());
  for (int e = 0; e < 4 && poly.size() >= 3; ++e) {
    poly = clip_half_plane(poly, cb[e], cb[(e + 1) % 4]);
  }
  ClipResult r;
  r.inter = poly.size() >= 3 ? shoelace_area(poly) : 0.0;
  r.area_a = shoelace_area(std::vector<Vec2>(ca.begin(), ca.end()));
  r.area_b = shoelace_area(std::vector<Vec2>(cb.begin(), cb.end()));
  return r;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double dx = p.x - (a.x + t * vx);
  const double dy = p.y - (a.y + t * vy);
  return std::hypot(dx, dy);
}

bool point_in_footprint(const OrientedBox3& b, double px, double py) {
  return point_in_box(b, Point3{px, py, b.cz, 0.0}, 0.0);
}

}  // namespace

double normalize_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  } else if (a > kPi) {
    a -= 2.0 * kPi;
  }
  return a;
}

PlanarPose::PlanarPose(double x_, double y_, double yaw_)
    : x(x_), y(y_), yaw(normalize_angle(yaw_)) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(yaw)) {
    throw std::invalid_argument("PlanarPose: coordinates must be finite");
  }
}

OrientedBox3::OrientedBox3(double cx_, double cy_, double cz_, double l_, double w_,
                           double h_, double yaw_)
    : cx(cx_), cy(cy_), cz(cz_), l(l_), w(w_), h(h_), yaw(normalize_angle(yaw_)) {
  const bool finite = std::isfinite(cx) && std::isfinite(cy) && std::isfinite(cz) &&
                      std::isfinite(l) && std::isfinite(w) && std::isfinite(h) &&
                      std::isfinite(yaw);
  if (!finite) throw std::invalid_argument("OrientedBox3: fields must be finite");
  if (l <= 0.0 || w <= 0.0 || h <= 0.0) {
    throw std::invalid_argument("OrientedBox3: dimensions must be positive");
  }
}

std::array<Vec2, 4> OrientedBox3::footprint() const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double hl = 0.5 * l;
  const double hw = 0.5 * w;
  const std::array<Vec2, 4> local{{{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}};
  std::array<Vec2, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = {cx + c * local[i].x - s * local[i].y, cy + s * local[i].x + c * local[i].y};
  }
  return out;
}

Point3 transform_to_frame(const Point3& p, const PlanarPose& src, const PlanarPose& dst) {
  if (src == dst) return p;
  const double cs = std::cos(src.yaw), ss = std::sin(src.yaw);
  const double wx = src.x + cs * p.x - ss * p.y;
  const double wy = src.y + ss * p.x + cs * p.y;
  const double cd = std::cos(dst.yaw), sd = std::sin(dst.yaw);
  const double dx = wx - dst.x, dy = wy - dst.y;
  return {cd * dx + sd * dy, -sd * dx + cd * dy, p.z, p.intensity};
}

OrientedBox3 transform_box_to_frame(const OrientedBox3& b, const PlanarPose& src,
                                    const PlanarPose& dst) {
  if (src == dst) return b;
  const Point3 c = transform_to_frame(Point3{b.cx, b.cy, b.cz, 0.0}, src, dst);
  return OrientedBox3(c.x, c.y, c.z, b.l, b.w, b.h,
                      normalize_angle(b.yaw + src.yaw - dst.yaw));
}

bool point_in_box(const OrientedBox3& b, const Point3& p, double margin) {
  if (margin < 0.0) throw std::invalid_argument("point_in_box: margin must be >= 0");
  if (p.z < b.cz - 0.5 * b.h || p.z > b.cz + 0.5 * b.h) return false;
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double dx = p.x - b.cx;
  const double dy = p.y - b.cy;
  const double lx = c * dx + s * dy;
  const double ly = -s * dx + c * dy;
  return std::abs(lx) <= 0.5 * b.l + margin && std::abs(ly) <= 0.5 * b.w + margin;
}

double rotated_iou_bev(const OrientedBox3& a, const OrientedBox3& b) {
  const ClipResult r = clip_footprints(a, b);
  if (r.inter <= kAreaEps) return 0.0;
  const double uni = r.area_a + r.area_b - r.inter;
  if (uni <= kAreaEps) return 0.0;
  const double iou = r.inter / uni;
  return std::clamp(iou, 0.0, 1.0);
}

std::vector<std::size_t> nms(const std::vector<OrientedBox3>& boxes,
                             const std::vector<double>& scores, double iou_thresh) {
  if (boxes.size() != scores.size()) {
    throw std::invalid_argument("nms: boxes and scores must have equal length");
  }
  if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) {
    throw std::invalid_argument("nms: iou_thresh must lie in (0, 1)");
  }
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<std::size_t> kept;
  kept.reserve(boxes.size());
  for (std::size_t idx : order) {
    bool suppressed = false;
    for (std::size_t k : kept) {
      if (rotated_iou_bev(boxes[idx], boxes[k]) > iou_thresh) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(idx);
  }
  return kept;
}

double footprint_distance(const OrientedBox3& a, const OrientedBox3& b) {
  if (clip_footprints(a, b).inter > kAreaEps) return 0.0;
  const auto ca = a.footprint();
  const auto cb = b.footprint();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(ca[i], cb[j], cb[(j + 1) % 4]));
      best = std::min(best, point_segment_distance(cb[i], ca[j], ca[(j + 1) % 4]));
    }
  }
  return best;
}

double footprint_distance_to_point(const OrientedBox3& b, const Vec2& p) {
  if (point_in_footprint(b, p.x, p.y)) return 0.0;
  const auto cb = b.footprint();
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 4; ++j) {
    best = std::min(best, point_segment_distance(p, cb[j], cb[(j + 1) % 4]));
  }
  return best;
}

}  // namespace hycomm
