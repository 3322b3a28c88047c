#include "selfsim/gate.hpp"

#include <cmath>

#include "selfsim/errors.hpp"

namespace selfsim {

void GateConfig::validate() const {
  if (!(th_hd >= 0.0) || !std::isfinite(th_hd)) {
    throw ContractViolation("gate: th_hd must be finite and non-negative");
  }
  if (!(iou_gate > 0.0 && iou_gate < 1.0)) {
    throw ContractViolation("gate: iou_gate must lie in (0, 1)");
  }
}

namespace {

GateDecision high_iou_bypass(double iou_value, const GateConfig& cfg) {
  GateDecision d;
  d.iou = iou_value;
  d.threshold = cfg.th_hd;
  d.indicator = 1;
  return d;
}

GateDecision decide(double iou_value, double hd, const GateConfig& cfg) {
  GateDecision d;
  d.iou = iou_value;
  d.threshold = cfg.th_hd;
  d.hd_tested = true;
  d.hd = hd;
  d.is_fractal = std::isfinite(hd) && hd <= cfg.th_hd;
  if (cfg.semantics == GateSemantics::Prose) {
    d.indicator = d.is_fractal ? 0 : 1;
  } else {
    d.indicator = hd <= cfg.th_hd ? 1 : 0;
  }
  return d;
}

}  // namespace

GateDecision gate_decision(double iou_value, const PixelExtraction& pred_crop,
                           const PixelExtraction& gt_crop, const GateConfig& cfg) {
  cfg.validate();
  if (iou_value >= cfg.iou_gate) return high_iou_bypass(iou_value, cfg);
  return decide(iou_value, normalized_hausdorff(pred_crop, gt_crop, cfg.normalization).symmetric,
                cfg);
}

GateDecision gate_decision(const GrayImage& scene, const BBox& pred, const BBox& gt,
                           const GateConfig& cfg, GateStats* stats) {
  cfg.validate();
  const double iou_value = iou(pred, gt);
  if (iou_value >= cfg.iou_gate) return high_iou_bypass(iou_value, cfg);

  const PixelExtraction p = extract_pixel_contour(scene, pred, cfg.binarization);
  const PixelExtraction g = extract_pixel_contour(scene, gt, cfg.binarization);
  if (stats != nullptr) stats->extractions += 2;
  return decide(iou_value, normalized_hausdorff(p, g, cfg.normalization).symmetric, cfg);
}

double gated_ciou_loss(const GrayImage& scene, const BBox& pred, const BBox& gt,
                       const GateConfig& cfg, GateStats* stats) {
  const GateDecision d = gate_decision(scene, pred, gt, cfg, stats);
  return d.indicator == 0 ? 0.0 : ciou_loss(pred, gt);
}

double gated_smooth_l1_loss(const GrayImage& scene, const BBox& pred, const BBox& gt,
                            const BBox& reference, const GateConfig& cfg,
                            GateStats* stats) {
  const GateDecision d = gate_decision(scene, pred, gt, cfg, stats);
  return d.indicator == 0 ? 0.0 : smooth_l1_box_loss(pred, gt, reference);
}

PairEvaluation evaluate_pair(const GrayImage& scene, const BBox& pred, const BBox& gt,
                             const BBox& reference, const GateConfig& cfg,
                             GateStats* stats) {
  PairEvaluation e;
  e.decision = gate_decision(scene, pred, gt, cfg, stats);
  e.ciou_loss = ciou_loss(pred, gt);
  e.smooth_l1_loss = smooth_l1_box_loss(pred, gt, reference);
  e.gated_ciou_loss = e.decision.indicator == 0 ? 0.0 : e.ciou_loss;
  e.gated_smooth_l1_loss = e.decision.indicator == 0 ? 0.0 : e.smooth_l1_loss;
  return e;
}

}  // namespace selfsim
