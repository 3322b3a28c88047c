#include "selfsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "selfsim/errors.hpp"

namespace selfsim {

namespace {

bool finite(const Point& p) noexcept { return std::isfinite(p.x) && std::isfinite(p.y); }

void require_same_space(const Contour& a, const Contour& b) {
  if (a.space() != b.space()) {
    throw ContractViolation("hausdorff: contours are in different coordinate spaces");
  }
}

}  // namespace

Contour::Contour(std::vector<Point> points, double frame_w, double frame_h,
                 CoordinateSpace space)
    : points_(std::move(points)), frame_w_(frame_w), frame_h_(frame_h), space_(space) {
  if (points_.empty()) throw ContractViolation("contour: empty point list");
  if (!(frame_w_ > 0.0) || !(frame_h_ > 0.0) || !std::isfinite(frame_w_) ||
      !std::isfinite(frame_h_)) {
    throw ContractViolation("contour: frame dimensions must be positive and finite");
  }
  for (const Point& p : points_) {
    if (!finite(p)) throw ContractViolation("contour: non-finite coordinate");
    if (space_ == CoordinateSpace::Normalized &&
        (p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0)) {
      throw ContractViolation("contour: normalized coordinate outside [0, 1]");
    }
  }
}

Contour::Contour(Unchecked, std::vector<Point> points, double frame_w, double frame_h,
                 CoordinateSpace space)
    : points_(std::move(points)), frame_w_(frame_w), frame_h_(frame_h), space_(space) {}

bool is_valid(const BBox& box) noexcept {
  return std::isfinite(box.x) && std::isfinite(box.y) && std::isfinite(box.w) &&
         std::isfinite(box.h) && box.w > 0.0 && box.h > 0.0;
}

double iou(const BBox& a, const BBox& b) noexcept {
  const double ix = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  // Edge-derived areas so that iou(a, a) is exactly 1.
  const double area_a = (a.right() - a.left()) * (a.bottom() - a.top());
  const double area_b = (b.right() - b.left()) * (b.bottom() - b.top());
  const double uni = area_a + area_b - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double directed_hausdorff_sq(std::span<const Point> a, std::span<const Point> b,
                             HausdorffKernel kernel) {
  double cmax = 0.0;
  if (kernel == HausdorffKernel::Naive) {
    for (const Point& p : a) {
      double cmin = kInfiniteDistance;
      for (const Point& q : b) {
        const double dx = p.x - q.x;
        const double dy = p.y - q.y;
        cmin = std::min(cmin, dx * dx + dy * dy);
      }
      cmax = std::max(cmax, cmin);
    }
    return cmax;
  }

  // Contours are ordered, so the nearest point to a[i+1] is usually close to
  // the nearest point to a[i]; start each inner scan there and wrap around.
  const std::size_t m = b.size();
  std::size_t start = 0;
  for (const Point& p : a) {
    double cmin = kInfiniteDistance;
    std::size_t best = start;
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t j = start + k;
      if (j >= m) j -= m;
      const double dx = p.x - b[j].x;
      const double dy = p.y - b[j].y;
      const double d = dx * dx + dy * dy;
      if (d < cmin) {
        cmin = d;
        best = j;
        if (cmin < cmax) break;  // p cannot raise the running max
      }
    }
    start = best;
    if (cmin > cmax) cmax = cmin;
  }
  return cmax;
}

double directed_hausdorff(const Contour& a, const Contour& b, HausdorffKernel kernel) {
  require_same_space(a, b);
  return std::sqrt(directed_hausdorff_sq(a.points(), b.points(), kernel));
}

HDResult hausdorff(const Contour& a, const Contour& b, HausdorffKernel kernel) {
  require_same_space(a, b);
  HDResult r;
  r.forward = std::sqrt(directed_hausdorff_sq(a.points(), b.points(), kernel));
  r.backward = std::sqrt(directed_hausdorff_sq(b.points(), a.points(), kernel));
  r.symmetric = std::max(r.forward, r.backward);
  return r;
}

Contour normalize_contour(const Contour& c) {
  if (c.space() != CoordinateSpace::Pixel) {
    throw ContractViolation("normalize_contour: contour is already normalized");
  }
  std::vector<Point> out;
  out.reserve(c.size());
  for (const Point& p : c.points()) {
    out.push_back({p.x / c.frame_w(), p.y / c.frame_h()});
  }
  // The checked constructor rejects points that were outside the frame.
  return Contour(std::move(out), c.frame_w(), c.frame_h(), CoordinateSpace::Normalized);
}

Contour normalize_contour_to(const Contour& c, double frame_w, double frame_h) {
  if (c.space() != CoordinateSpace::Pixel) {
    throw ContractViolation("normalize_contour_to: contour is already normalized");
  }
  if (!(frame_w > 0.0) || !(frame_h > 0.0)) {
    throw ContractViolation("normalize_contour_to: frame dimensions must be positive");
  }
  std::vector<Point> out;
  out.reserve(c.size());
  for (const Point& p : c.points()) out.push_back({p.x / frame_w, p.y / frame_h});
  return Contour(Contour::Unchecked{}, std::move(out), frame_w, frame_h,
                 CoordinateSpace::Normalized);
}

}  // namespace selfsim
