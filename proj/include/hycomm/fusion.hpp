#pragma once

#include <cstdint>
#include <vector>

#include "hycomm/detector.hpp"
#include "hycomm/geometry.hpp"

namespace hycomm {

struct FusionConfig {
  double nms_thresh = 0.15;
  /// Score assigned to received boxes for NMS ordering; their true
  /// confidence never travels on the wire.
  double recv_box_score = 0.5;

  bool operator==(const FusionConfig&) const = default;
};

/// Early fusion: re-detect over the union of the ego cloud and the received
/// points (already expressed in the ego frame). With no received points this
/// is exactly the single-agent detection for the same seed.
DetectionSet fuse_early(const PointCloud& ego_cloud, const PointCloud& received_points,
                        const std::vector<OrientedBox3>& objects, const Rect& fp_region,
                        const DetectorProfile& profile, std::uint64_t detect_seed);

/// Late fusion: received boxes adopt recv_box_score (variance unknown, so 0),
/// join the local set behind it, and the union goes through NMS. Equal scores
/// favor local detections.
DetectionSet fuse_late(const DetectionSet& local,
                       const std::vector<OrientedBox3>& received_boxes,
                       const FusionConfig& cfg);

}  // namespace hycomm
