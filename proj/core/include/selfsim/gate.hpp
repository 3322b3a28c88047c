#pragma once

#include <cstddef>

#include "selfsim/geometry.hpp"
#include "selfsim/loss.hpp"
#include "selfsim/mask.hpp"

namespace selfsim {

/// How the fractal indicator multiplies the box-regression loss.
enum class GateSemantics {
  Prose,            // similar (fractal) pairs get zero loss
  LiteralEquation,  // loss * 1{hd <= th}, i.e. dissimilar pairs get zero loss
};

struct GateConfig {
  double th_hd = 0.50;
  double iou_gate = 0.50;
  GateSemantics semantics = GateSemantics::Prose;
  Binarization binarization = Binarization::otsu();
  Normalization normalization = Normalization::OwnCrop;

  /// Throws ContractViolation unless th_hd >= 0 and iou_gate is in (0, 1).
  void validate() const;
};

struct GateDecision {
  double hd = kInfiniteDistance;  // +inf when not tested or a contour is absent
  double threshold = 0.0;
  int indicator = 1;              // multiplier applied to the box loss
  bool is_fractal = false;
  bool hd_tested = false;         // false on the high-IoU bypass
  double iou = 0.0;
};

/// Instrumentation for callers that need to observe how much work a gate did.
struct GateStats {
  std::size_t extractions = 0;  // contour extractions performed
};

GateDecision gate_decision(const GrayImage& scene, const BBox& pred, const BBox& gt,
                           const GateConfig& cfg, GateStats* stats = nullptr);

/// Decision from already-extracted crops (the caller did the extraction).
GateDecision gate_decision(double iou_value, const PixelExtraction& pred_crop,
                           const PixelExtraction& gt_crop, const GateConfig& cfg);

double gated_ciou_loss(const GrayImage& scene, const BBox& pred, const BBox& gt,
                       const GateConfig& cfg, GateStats* stats = nullptr);

double gated_smooth_l1_loss(const GrayImage& scene, const BBox& pred, const BBox& gt,
                            const BBox& reference, const GateConfig& cfg,
                            GateStats* stats = nullptr);

/// Every value the batch `gate` command reports for one pair.
struct PairEvaluation {
  GateDecision decision;
  double ciou_loss = 0.0;
  double gated_ciou_loss = 0.0;
  double smooth_l1_loss = 0.0;
  double gated_smooth_l1_loss = 0.0;
};

PairEvaluation evaluate_pair(const GrayImage& scene, const BBox& pred, const BBox& gt,
                             const BBox& reference, const GateConfig& cfg,
                             GateStats* stats = nullptr);

}  // namespace selfsim
