#include "selfsim/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selfsim/errors.hpp"

namespace selfsim {

CIoUTerms ciou_terms(const BBox& pred, const BBox& gt) noexcept {
  CIoUTerms t;
  t.iou = iou(pred, gt);

  const double dx = pred.x - gt.x;
  const double dy = pred.y - gt.y;
  t.center_dist_sq = dx * dx + dy * dy;

  const double ew = std::max(pred.right(), gt.right()) - std::min(pred.left(), gt.left());
  const double eh = std::max(pred.bottom(), gt.bottom()) - std::min(pred.top(), gt.top());
  t.enclosing_diag_sq = ew * ew + eh * eh;

  const double da = std::atan(gt.w / gt.h) - std::atan(pred.w / pred.h);
  t.nu = 4.0 / (std::numbers::pi * std::numbers::pi) * da * da;
  t.alpha = t.nu == 0.0 ? 0.0 : t.nu / ((1.0 - t.iou) + t.nu);
  return t;
}

double ciou_loss(const BBox& pred, const BBox& gt) noexcept {
  const CIoUTerms t = ciou_terms(pred, gt);
  const double dist = t.enclosing_diag_sq > 0.0 ? t.center_dist_sq / t.enclosing_diag_sq : 0.0;
  return 1.0 - t.iou + dist + t.alpha * t.nu;
}

RegressionTarget encode_regression(const BBox& box, const BBox& reference) {
  if (!(box.w > 0.0) || !(box.h > 0.0) || !(reference.w > 0.0) || !(reference.h > 0.0)) {
    throw ContractViolation("encode_regression: box dimensions must be positive");
  }
  return {(box.x - reference.x) / reference.w, (box.y - reference.y) / reference.h,
          std::log(box.w / reference.w), std::log(box.h / reference.h)};
}

double smooth_l1(double x) noexcept {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

double smooth_l1_box_loss(const BBox& pred, const BBox& gt, const BBox& reference) {
  const RegressionTarget t = encode_regression(pred, reference);
  const RegressionTarget v = encode_regression(gt, reference);
  return smooth_l1(t.tx - v.tx) + smooth_l1(t.ty - v.ty) + smooth_l1(t.tw - v.tw) +
         smooth_l1(t.th - v.th);
}

}  // namespace selfsim
