#pragma once

#include <cstdint>
#include <vector>

#include "hycomm/detector.hpp"
#include "hycomm/messaging.hpp"

namespace hycomm {

struct ApResult {
  double ap30 = 0.0;
  double ap50 = 0.0;
  double ap70 = 0.0;
  std::size_t n_gt = 0;
  std::size_t n_det = 0;
};

struct VolumeReport {
  std::uint64_t payload_bytes = 0;
  double log2_bytes = 0.0;  // log2(max(payload_bytes, 1))
};

/// Greedy matching in descending confidence order (ties: lower index). A
/// detection is a true positive iff its best-IoU still-unmatched ground
/// truth reaches iou_thresh; that ground truth is then consumed. Flags come
/// back in the visited (descending-confidence) order.
std::vector<bool> match_detections(const DetectionSet& dets,
                                   const std::vector<OrientedBox3>& gts,
                                   double iou_thresh);

/// Area under the precision-recall curve with the monotone precision
/// envelope. Flags must already be sorted by descending confidence.
/// Conventions: n_gt == 0 with no detections -> 1.0; with detections -> 0.0.
double average_precision(const std::vector<bool>& flags, std::size_t n_gt);

/// AP at IoU 0.30 / 0.50 / 0.70.
ApResult evaluate(const DetectionSet& dets, const std::vector<OrientedBox3>& gts);

VolumeReport volume_from_bytes(std::uint64_t payload_bytes);
VolumeReport communication_volume(const std::vector<HybridMessage>& msgs);

}  // namespace hycomm
