#include "hycomm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hycomm {

std::vector<bool> match_detections(const DetectionSet& dets,
                                   const std::vector<OrientedBox3>& gts,
                                   double iou_thresh) {
  if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) {
    throw std::invalid_argument("match_detections: iou_thresh must lie in (0, 1)");
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets.items[a].c > dets.items[b].c;
  });

  std::vector<bool> gt_matched(gts.size(), false);
  std::vector<bool> flags(dets.size(), false);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const OrientedBox3& box = dets.items[order[rank]].box;
    double best_iou = 0.0;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_matched[g]) continue;
      const double iou = rotated_iou_bev(box, gts[g]);
      if (iou > best_iou) {
        best_iou = iou;
        best_gt = g;
      }
    }
    if (best_gt < gts.size() && best_iou >= iou_thresh) {
      flags[rank] = true;
      gt_matched[best_gt] = true;
    }
  }
  return flags;
}

double average_precision(const std::vector<bool>& flags, std::size_t n_gt) {
  if (n_gt == 0) return flags.empty() ? 1.0 : 0.0;
  if (flags.empty()) return 0.0;

  const std::size_t n = flags.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (flags[i]) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(n_gt);
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    precision[i] = std::max(precision[i], precision[i + 1]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (recall[i] > prev_recall) {
      ap += (recall[i] - prev_recall) * precision[i];
      prev_recall = recall[i];
    }
  }
  return ap;
}

ApResult evaluate(const DetectionSet& dets, const std::vector<OrientedBox3>& gts) {
  ApResult r;
  r.n_gt = gts.size();
  r.n_det = dets.size();
  r.ap30 = average_precision(match_detections(dets, gts, 0.30), gts.size());
  r.ap50 = average_precision(match_detections(dets, gts, 0.50), gts.size());
  r.ap70 = average_precision(match_detections(dets, gts, 0.70), gts.size());
  return r;
}

VolumeReport volume_from_bytes(std::uint64_t payload_bytes) {
  VolumeReport v;
  v.payload_bytes = payload_bytes;
  v.log2_bytes = std::log2(static_cast<double>(std::max<std::uint64_t>(payload_bytes, 1)));
  return v;
}

VolumeReport communication_volume(const std::vector<HybridMessage>& msgs) {
  std::uint64_t total = 0;
  for (const HybridMessage& m : msgs) total += m.payload_bytes();
  return volume_from_bytes(total);
}

}  // namespace hycomm
