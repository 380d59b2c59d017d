#include "hycomm/fusion.hpp"

#include <stdexcept>

namespace hycomm {

DetectionSet fuse_early(const PointCloud& ego_cloud, const PointCloud& received_points,
                        const std::vector<OrientedBox3>& objects, const Rect& fp_region,
                        const DetectorProfile& profile, std::uint64_t detect_seed) {
  if (received_points.empty()) {
    return detect(ego_cloud, objects, fp_region, profile, detect_seed);
  }
  PointCloud merged;
  merged.reserve(ego_cloud.size() + received_points.size());
  merged.insert(merged.end(), ego_cloud.begin(), ego_cloud.end());
  merged.insert(merged.end(), received_points.begin(), received_points.end());
  return detect(merged, objects, fp_region, profile, detect_seed);
}

DetectionSet fuse_late(const DetectionSet& local,
                       const std::vector<OrientedBox3>& received_boxes,
                       const FusionConfig& cfg) {
  if (!(cfg.nms_thresh > 0.0 && cfg.nms_thresh < 1.0)) {
    throw std::invalid_argument("fuse_late: nms_thresh must lie in (0, 1)");
  }
  if (!(cfg.recv_box_score > 0.0 && cfg.recv_box_score < 1.0)) {
    throw std::invalid_argument("fuse_late: recv_box_score must lie in (0, 1)");
  }

  std::vector<Detection> merged = local.items;
  merged.reserve(local.size() + received_boxes.size());
  for (const OrientedBox3& b : received_boxes) {
    merged.push_back(Detection{b, cfg.recv_box_score, 0.0, 0.0});
  }

  std::vector<OrientedBox3> boxes;
  std::vector<double> scores;
  boxes.reserve(merged.size());
  scores.reserve(merged.size());
  for (const Detection& d : merged) {
    boxes.push_back(d.box);
    scores.push_back(d.c);
  }

  DetectionSet out;
  for (std::size_t idx : nms(boxes, scores, cfg.nms_thresh)) {
    out.items.push_back(merged[idx]);
  }
  return out;
}

}  // namespace hycomm
