#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace selfsim {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class CoordinateSpace { Pixel, Normalized };

/// Ordered boundary points of one connected region plus the frame they were
/// measured in. Never empty: "no contour" is modelled with std::optional by
/// the callers that can produce it.
class Contour {
 public:
  /// Throws ContractViolation on an empty point list, non-finite coordinates,
  /// a non-positive frame, or Normalized coordinates outside [0, 1].
  Contour(std::vector<Point> points, double frame_w, double frame_h,
          CoordinateSpace space = CoordinateSpace::Pixel);

  const std::vector<Point>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double frame_w() const noexcept { return frame_w_; }
  double frame_h() const noexcept { return frame_h_; }
  CoordinateSpace space() const noexcept { return space_; }

  friend bool operator==(const Contour&, const Contour&) = default;

 private:
  struct Unchecked {};
  Contour(Unchecked, std::vector<Point> points, double frame_w, double frame_h,
          CoordinateSpace space);

  friend Contour normalize_contour_to(const Contour&, double, double);

  std::vector<Point> points_;
  double frame_w_;
  double frame_h_;
  CoordinateSpace space_;
};

/// Center-based axis-aligned box in pixels.
struct BBox {
  double x = 0.0;  // center
  double y = 0.0;  // center
  double w = 0.0;
  double h = 0.0;

  double left() const noexcept { return x - 0.5 * w; }
  double right() const noexcept { return x + 0.5 * w; }
  double top() const noexcept { return y - 0.5 * h; }
  double bottom() const noexcept { return y + 0.5 * h; }
  double area() const noexcept { return w * h; }

  /// Converts from a corner box [x_min, y_min, w, h].
  static BBox from_corner(double x_min, double y_min, double w, double h) noexcept {
    return {x_min + 0.5 * w, y_min + 0.5 * h, w, h};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// True when w, h > 0 and all fields are finite.
bool is_valid(const BBox& box) noexcept;

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

struct HDResult {
  double forward = 0.0;   // h(A, B)
  double backward = 0.0;  // h(B, A)
  double symmetric = 0.0;

  static HDResult absent() noexcept {
    return {kInfiniteDistance, kInfiniteDistance, kInfiniteDistance};
  }
};

double iou(const BBox& a, const BBox& b) noexcept;

enum class HausdorffKernel {
  Naive,       // full O(n*m) scan, the reference
  EarlyBreak,  // inner scan stops once the running min cannot raise the max
};

/// One-way distance h(A, B): max over a in A of min over b in B of |a - b|.
double directed_hausdorff(const Contour& a, const Contour& b,
                          HausdorffKernel kernel = HausdorffKernel::EarlyBreak);

HDResult hausdorff(const Contour& a, const Contour& b,
                   HausdorffKernel kernel = HausdorffKernel::EarlyBreak);

/// Squared directed distance over raw point spans; both kernels return the
/// same double bit-for-bit.
double directed_hausdorff_sq(std::span<const Point> a, std::span<const Point> b,
                             HausdorffKernel kernel);

/// Divides x by frame_w and y by frame_h. Requires a Pixel-space contour whose
/// points lie inside its frame.
Contour normalize_contour(const Contour& c);

/// Normalizes against an explicit frame instead of the contour's own. Points
/// outside that frame map outside [0, 1]; used for shared-frame comparisons.
Contour normalize_contour_to(const Contour& c, double frame_w, double frame_h);

}  // namespace selfsim
