#pragma once

#include "selfsim/geometry.hpp"

namespace selfsim {

struct CIoUTerms {
  double iou = 0.0;
  double center_dist_sq = 0.0;     // rho^2 between box centers, px^2
  double enclosing_diag_sq = 0.0;  // c^2 of the smallest enclosing box, px^2
  double nu = 0.0;                 // aspect-ratio consistency
  double alpha = 0.0;              // trade-off weight, 0 when nu == 0
};

CIoUTerms ciou_terms(const BBox& pred, const BBox& gt) noexcept;

/// 1 - IoU + rho^2 / c^2 + alpha * nu.
double ciou_loss(const BBox& pred, const BBox& gt) noexcept;

/// R-CNN box parameterization relative to a reference (anchor/proposal) box.
struct RegressionTarget {
  double tx = 0.0;
  double ty = 0.0;
  double tw = 0.0;
  double th = 0.0;
};

/// Throws ContractViolation on non-positive dimensions.
RegressionTarget encode_regression(const BBox& box, const BBox& reference);

double smooth_l1(double x) noexcept;

/// Sum of smooth_l1 over the four residuals of encode(pred) - encode(gt).
double smooth_l1_box_loss(const BBox& pred, const BBox& gt, const BBox& reference);

}  // namespace selfsim
