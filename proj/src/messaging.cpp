#include "hycomm/messaging.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

namespace hycomm {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'H', 'Y', 'C', '1'};
constexpr std::uint16_t kWireVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

struct Reader {
  const std::uint8_t* p;
  std::size_t remaining;

  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    p += 2;
    remaining -= 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    p += 4;
    remaining -= 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
};

}  // namespace

WireBox to_wire(const OrientedBox3& b) {
  return WireBox{static_cast<float>(b.cx), static_cast<float>(b.cy),
                 static_cast<float>(b.cz), static_cast<float>(b.l),
                 static_cast<float>(b.w),  static_cast<float>(b.h),
                 static_cast<float>(b.yaw)};
}

WirePoint to_wire(const Point3& p) {
  return WirePoint{static_cast<float>(p.x), static_cast<float>(p.y),
                   static_cast<float>(p.z), static_cast<float>(p.intensity)};
}

WirePose to_wire(const PlanarPose& p) {
  return WirePose{static_cast<float>(p.x), static_cast<float>(p.y),
                  static_cast<float>(p.yaw)};
}

OrientedBox3 from_wire(const WireBox& b) {
  return OrientedBox3(b.x, b.y, b.z, b.l, b.w, b.h, b.yaw);
}

Point3 from_wire(const WirePoint& p) { return Point3{p.x, p.y, p.z, p.intensity}; }

PlanarPose from_wire(const WirePose& p) { return PlanarPose(p.x, p.y, p.yaw); }

std::size_t SelectionMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

BudgetSplit allocate_budget(Budget b, std::size_t k) {
  BudgetSplit split;
  split.b_box = std::min<std::uint64_t>(k, b.floats / 7);
  const std::uint64_t box_cost = 7 * static_cast<std::uint64_t>(k);
  split.b_point = b.floats > box_cost ? (b.floats - box_cost) / 4 : 0;
  return split;
}

SelectionMask select_boxes(const std::vector<double>& confidences, std::size_t b_box) {
  const std::size_t k = confidences.size();
  SelectionMask mask;
  mask.bits.assign(k, 0);
  if (b_box == 0) return mask;
  if (b_box >= k) {
    mask.bits.assign(k, 1);
    return mask;
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidences[a] > confidences[b];
  });
  for (std::size_t i = 0; i < b_box; ++i) mask.bits[order[i]] = 1;
  return mask;
}

std::vector<WireBox> pack_box_message(const DetectionSet& dets, const SelectionMask& mask) {
  if (mask.bits.size() != dets.size()) {
    throw std::invalid_argument("pack_box_message: mask length must equal detection count");
  }
  std::vector<std::size_t> selected;
  selected.reserve(mask.count());
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (mask.bits[i]) selected.push_back(i);
  }
  std::stable_sort(selected.begin(), selected.end(), [&](std::size_t a, std::size_t b) {
    return dets.items[a].c > dets.items[b].c;
  });
  std::vector<WireBox> out;
  out.reserve(selected.size());
  for (std::size_t i : selected) out.push_back(to_wire(dets.items[i].box));
  return out;
}

std::vector<OrientedBox3> expand_boxes(const DetectionSet& dets, const PackerConfig& cfg) {
  if (cfg.expand_cap < 0.0) {
    throw std::invalid_argument("expand_boxes: expand_cap must be >= 0");
  }
  std::vector<OrientedBox3> out;
  out.reserve(dets.size());
  for (const Detection& d : dets.items) {
    if (d.ux < 0.0 || d.uy < 0.0) {
      throw std::invalid_argument("expand_boxes: variances must be >= 0");
    }
    const double grow_l = std::min(2.0 * std::sqrt(d.ux), cfg.expand_cap);
    const double grow_w = std::min(2.0 * std::sqrt(d.uy), cfg.expand_cap);
    out.emplace_back(d.box.cx, d.box.cy, d.box.cz, d.box.l + grow_l, d.box.w + grow_w,
                     d.box.h, d.box.yaw);
  }
  return out;
}

std::vector<double> weight_points(const PointCloud& cloud,
                                  const std::vector<OrientedBox3>& expanded,
                                  const DetectionSet& dets, const PackerConfig& cfg) {
  if (cfg.delta <= 0.0) throw std::invalid_argument("weight_points: delta must be > 0");
  if (expanded.size() != dets.size()) {
    throw std::invalid_argument("weight_points: expanded boxes must match detections");
  }
  std::vector<double> weights(cloud.size(), cfg.delta);
  if (expanded.empty()) return weights;

  std::vector<double> reach(expanded.size());
  for (std::size_t i = 0; i < expanded.size(); ++i) {
    reach[i] = 0.5 * std::hypot(expanded[i].l, expanded[i].w);
  }
  for (std::size_t pi = 0; pi < cloud.size(); ++pi) {
    const Point3& p = cloud[pi];
    double best = 0.0;
    for (std::size_t i = 0; i < expanded.size(); ++i) {
      const double dx = p.x - expanded[i].cx;
      const double dy = p.y - expanded[i].cy;
      if (dx * dx + dy * dy > reach[i] * reach[i]) continue;
      if (!point_in_box(expanded[i], p, 0.0)) continue;
      best = std::max(best, dets.items[i].ux + dets.items[i].uy);
    }
    if (best > 0.0) weights[pi] = std::max(best, cfg.delta);
  }
  return weights;
}

std::vector<std::size_t> weighted_sample_indices(const std::vector<double>& weights,
                                                 std::size_t b, Rng& rng) {
  const std::size_t n = weights.size();
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weighted_sample_indices: weights must be positive");
    }
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (b >= n) return idx;

  // log-domain exponential keys; same ordering as u^(1/w), immune to
  // underflow at tiny weights.
  std::vector<double> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = std::log(uniform01_positive(rng)) / weights[i];
  }
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(b), idx.end(),
                    [&](std::size_t a, std::size_t c) {
                      if (keys[a] != keys[c]) return keys[a] > keys[c];
                      return a < c;
                    });
  idx.resize(b);
  return idx;
}

HybridMessage pack_hybrid(const DetectionSet& dets, const PointCloud& cloud, Budget b,
                          const PackerConfig& cfg, Rng& rng, const WirePose& sender_pose) {
  const BudgetSplit split = allocate_budget(b, dets.size());
  HybridMessage msg;
  msg.sender_pose = sender_pose;
  msg.boxes = pack_box_message(dets, select_boxes(dets.confidences(), split.b_box));
  if (split.b_point > 0 && !cloud.empty()) {
    const std::vector<OrientedBox3> expanded = expand_boxes(dets, cfg);
    const std::vector<double> weights = weight_points(cloud, expanded, dets, cfg);
    msg.points.reserve(std::min(split.b_point, cloud.size()));
    for (std::size_t i : weighted_sample_indices(weights, split.b_point, rng)) {
      msg.points.push_back(to_wire(cloud[i]));
    }
  }
  return msg;
}

std::vector<std::uint8_t> serialize(const HybridMessage& msg) {
  if (msg.boxes.size() > 0xffffffffULL || msg.points.size() > 0xffffffffULL) {
    throw std::invalid_argument("serialize: counts must fit 32 bits");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kWireHeaderBytes + msg.payload_bytes());
  for (std::uint8_t m : kMagic) out.push_back(m);
  put_u16(out, kWireVersion);
  put_f32(out, msg.sender_pose.x);
  put_f32(out, msg.sender_pose.y);
  put_f32(out, msg.sender_pose.yaw);
  put_u32(out, static_cast<std::uint32_t>(msg.boxes.size()));
  put_u32(out, static_cast<std::uint32_t>(msg.points.size()));
  for (const WireBox& b : msg.boxes) {
    put_f32(out, b.x);
    put_f32(out, b.y);
    put_f32(out, b.z);
    put_f32(out, b.l);
    put_f32(out, b.w);
    put_f32(out, b.h);
    put_f32(out, b.yaw);
  }
  for (const WirePoint& p : msg.points) {
    put_f32(out, p.x);
    put_f32(out, p.y);
    put_f32(out, p.z);
    put_f32(out, p.intensity);
  }
  return out;
}

HybridMessage deserialize(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kWireHeaderBytes) {
    throw WireFormatError("deserialize: frame shorter than header");
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw WireFormatError("deserialize: bad magic");
  }
  Reader r{bytes.data() + kMagic.size(), bytes.size() - kMagic.size()};
  const std::uint16_t version = r.u16();
  if (version != kWireVersion) {
    throw WireFormatError("deserialize: unsupported version");
  }
  HybridMessage msg;
  msg.sender_pose.x = r.f32();
  msg.sender_pose.y = r.f32();
  msg.sender_pose.yaw = r.f32();
  const std::uint32_t n_boxes = r.u32();
  const std::uint32_t n_points = r.u32();
  const std::size_t expected =
      kWireHeaderBytes + kBoxPayloadBytes * static_cast<std::size_t>(n_boxes) +
      kPointPayloadBytes * static_cast<std::size_t>(n_points);
  if (bytes.size() != expected) {
    throw WireFormatError("deserialize: length does not match declared counts");
  }
  msg.boxes.resize(n_boxes);
  for (WireBox& b : msg.boxes) {
    b.x = r.f32();
    b.y = r.f32();
    b.z = r.f32();
    b.l = r.f32();
    b.w = r.f32();
    b.h = r.f32();
    b.yaw = r.f32();
  }
  msg.points.resize(n_points);
  for (WirePoint& p : msg.points) {
    p.x = r.f32();
    p.y = r.f32();
    p.z = r.f32();
    p.intensity = r.f32();
  }
  return msg;
}

}  // namespace hycomm
