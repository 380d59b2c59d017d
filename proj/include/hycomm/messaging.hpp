#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hycomm/detector.hpp"
#include "hycomm/geometry.hpp"
#include "hycomm/rng.hpp"

namespace hycomm {

/// Channel capacity for one message, counted in 32-bit values. A box costs 7
/// floats, a point 4; byte figures are derived (x4).
struct Budget {
  std::uint64_t floats = 0;
};

struct BudgetSplit {
  std::size_t b_box = 0;
  std::size_t b_point = 0;
};

struct SelectionMask {
  std::vector<std::uint8_t> bits;  // one per detection, 1 = selected

  std::size_t count() const;
};

struct PackerConfig {
  /// Default weight for points outside every expanded detection, and the
  /// floor for points inside one.
  double delta = 1e-3;
  /// Cap on the total extent added to l or w by uncertainty expansion.
  double expand_cap = 2.0;

  bool operator==(const PackerConfig&) const = default;
};

/// Wire-precision records. Contents are stored as float32 so that
/// serialization round-trips bit-exactly.
struct WireBox {
  float x = 0, y = 0, z = 0, l = 0, w = 0, h = 0, yaw = 0;
  bool operator==(const WireBox&) const = default;
};
struct WirePoint {
  float x = 0, y = 0, z = 0, intensity = 0;
  bool operator==(const WirePoint&) const = default;
};
struct WirePose {
  float x = 0, y = 0, yaw = 0;
  bool operator==(const WirePose&) const = default;
};

inline constexpr std::size_t kBoxPayloadBytes = 28;    // 7 x float32
inline constexpr std::size_t kPointPayloadBytes = 16;  // 4 x float32
inline constexpr std::size_t kWireHeaderBytes = 26;    // magic + version + pose + counts

struct HybridMessage {
  WirePose sender_pose;
  std::vector<WireBox> boxes;
  std::vector<WirePoint> points;

  std::size_t payload_bytes() const {
    return kBoxPayloadBytes * boxes.size() + kPointPayloadBytes * points.size();
  }
  bool operator==(const HybridMessage&) const = default;
};

struct WireFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

WireBox to_wire(const OrientedBox3& b);
WirePoint to_wire(const Point3& p);
WirePose to_wire(const PlanarPose& p);
OrientedBox3 from_wire(const WireBox& b);
Point3 from_wire(const WirePoint& p);
PlanarPose from_wire(const WirePose& p);

/// Boxes first: b_box = min(K, floor(B/7)); points get the remainder only
/// when the full detection set fits, b_point = floor((B - 7K) / 4).
BudgetSplit allocate_budget(Budget b, std::size_t k);

/// Picks the b_box highest-confidence indices (ties: lower index). The
/// selected set maximizes the summed confidence over all masks of size
/// <= b_box.
SelectionMask select_boxes(const std::vector<double>& confidences, std::size_t b_box);

/// Emits the 7 regression parameters of each selected detection in
/// descending-confidence order. Confidence and variance never travel.
std::vector<WireBox> pack_box_message(const DetectionSet& dets, const SelectionMask& mask);

/// Grows each detection footprint by its reported center uncertainty:
/// l' = l + min(2 sqrt(ux), expand_cap), w' = w + min(2 sqrt(uy), expand_cap).
std::vector<OrientedBox3> expand_boxes(const DetectionSet& dets, const PackerConfig& cfg);

/// Per-point sampling weights: a point inside at least one expanded box gets
/// the max of the containing detections' ux + uy (floored at delta); points
/// outside every box get delta. All outputs are > 0.
std::vector<double> weight_points(const PointCloud& cloud,
                                  const std::vector<OrientedBox3>& expanded,
                                  const DetectionSet& dets, const PackerConfig& cfg);

/// Weighted sampling without replacement via exponential keys: each index
/// draws key = log(u)/w and the top-b keys win, so inclusion is biased
/// toward heavy weights. b >= size returns every index (in order) without
/// consuming the stream.
std::vector<std::size_t> weighted_sample_indices(const std::vector<double>& weights,
                                                 std::size_t b, Rng& rng);

/// Full packer pipeline: allocate -> select -> pack boxes -> expand ->
/// weight -> sample. The result satisfies 7 * boxes + 4 * points <= B.
HybridMessage pack_hybrid(const DetectionSet& dets, const PointCloud& cloud, Budget b,
                          const PackerConfig& cfg, Rng& rng,
                          const WirePose& sender_pose = {});

/// Frame layout (little-endian): magic "HYC1", version u16, sender pose as
/// 3 x f32, n_boxes u32, n_points u32, then 7 x f32 per box and 4 x f32 per
/// point. The 26-byte header is excluded from budget accounting.
std::vector<std::uint8_t> serialize(const HybridMessage& msg);

/// Inverse of serialize. Throws WireFormatError on bad magic, unsupported
/// version, truncation, or count/length mismatch.
HybridMessage deserialize(const std::vector<std::uint8_t>& bytes);

}  // namespace hycomm
