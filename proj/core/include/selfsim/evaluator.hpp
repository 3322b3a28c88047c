#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "selfsim/contour_cache.hpp"
#include "selfsim/detection.hpp"

namespace selfsim {

enum class EvalMode {
  AP50,  // IoU >= iou_thresh makes a true positive
  APss,  // ... or normalized HD to the ground-truth crop <= th_hd
};

std::string to_string(EvalMode mode);
EvalMode parse_eval_mode(const std::string& text);

struct EvalConfig {
  EvalMode mode = EvalMode::AP50;
  double iou_thresh = 0.50;
  double th_hd = 0.50;
  Normalization normalization = Normalization::OwnCrop;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;

  friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

/// Cumulative (recall, precision) after each ranked label (true = TP).
/// Recall is 0 throughout when n_gt is 0.
std::vector<PrPoint> pr_curve(const std::vector<bool>& labels, std::size_t n_gt);

/// All-point interpolated AP: area under the monotone precision envelope.
double average_precision(std::span<const PrPoint> curve);

struct MatchResult {
  std::vector<bool> is_tp;        // per detection, input order
  std::vector<long> matched_gt;   // index into the GT span, or -1
  std::vector<bool> via_hd;       // matched through the HD relaxation
  std::vector<bool> gt_matched;   // per ground truth
};

/// Greedy one-to-one matching in descending score order (ties: lower input
/// index first). A detection may claim an unmatched same-class GT of the same
/// image. Preference among eligible GTs: IoU-qualified before HD-only, then
/// larger IoU, then smaller HD (HD-only candidates), then lower GT index.
/// APss mode needs `contours`; without it DataError("images required for
/// AP-ss") is thrown.
MatchResult match_detections(std::span<const Detection> dets,
                             std::span<const GroundTruth> gts, const EvalConfig& cfg,
                             ContourSource* contours = nullptr);

struct ClassReport {
  ClassId id = 0;
  std::string name;
  std::size_t n_gt = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double ap = 0.0;
  double recall = 0.0;
  std::vector<PrPoint> curve;
};

struct EvalReport {
  EvalMode mode = EvalMode::AP50;
  std::vector<ClassReport> classes;  // in category order
  double map = 0.0;                  // mean AP over classes with at least one GT
  double recall = 0.0;               // TP / all GT
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  const ClassReport* find(ClassId id) const noexcept;
};

/// Throws DataError listing detections or ground truths that reference
/// unknown image or category ids.
void validate_references(const Dataset& dataset, std::span<const Detection> dets);

EvalReport evaluate(const Dataset& dataset, std::span<const Detection> dets,
                    const EvalConfig& cfg, ContourSource* contours = nullptr);

}  // namespace selfsim
