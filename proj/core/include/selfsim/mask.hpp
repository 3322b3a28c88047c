#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selfsim/geometry.hpp"

namespace selfsim {

/// Row-major 8-bit grayscale image.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }
  const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }
  std::vector<std::uint8_t>& pixels() noexcept { return pixels_; }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Row-major foreground flags (stored as bytes, 0 or 1).
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  bool get(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }

  /// Out-of-range coordinates read as background.
  bool get_or_background(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_ && bits_[index(x, y)] != 0;
  }

  std::size_t count() const noexcept;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Box edges rounded half-up to integers, then clamped to the image.
PixelRect crop_rect(int image_w, int image_h, const BBox& box) noexcept;

/// Throws DataError("empty crop") when the box misses the image.
GrayImage crop(const GrayImage& img, const BBox& box);

struct Binarization {
  enum class Method { Otsu, Fixed };
  Method method = Method::Otsu;
  int threshold = 128;  // only used by Fixed

  static Binarization otsu() noexcept { return {}; }
  static Binarization fixed(int t) noexcept { return {Method::Fixed, t}; }

  /// "otsu" or "fixed:<t>".
  std::string to_string() const;
  /// Throws DataError on anything else.
  static Binarization parse(const std::string& text);

  friend bool operator==(const Binarization&, const Binarization&) = default;
};

/// Otsu threshold over the 256-bin histogram; foreground is >= threshold.
/// Returns 256 (nothing is foreground) for a single-level image. Ties go to
/// the smallest threshold.
int otsu_threshold(const GrayImage& img);

BinaryMask binarize(const GrayImage& img, Binarization method = Binarization::otsu());

/// Keeps the largest 8-connected foreground component. Equal areas resolve to
/// the component whose topmost-leftmost pixel comes first in raster order.
BinaryMask max_component(const BinaryMask& mask);

/// Moore-neighbour border following from the topmost-leftmost pixel,
/// clockwise, not closed (the first point is not repeated). Points are pixel
/// centers as (column, row). Throws DataError("no foreground") on an empty
/// mask.
Contour trace_outer_contour(const BinaryMask& component);

struct PixelExtraction {
  std::optional<Contour> contour;  // Pixel space, relative to the crop origin
  std::size_t foreground_area = 0;
  int crop_w = 0;
  int crop_h = 0;
};

/// crop -> binarize -> max_component -> trace, without normalization.
PixelExtraction extract_pixel_contour(const GrayImage& img, const BBox& box,
                                      Binarization method = Binarization::otsu());

struct ContourExtraction {
  std::optional<Contour> contour;  // Normalized against the crop's own size
  std::size_t foreground_area = 0;
};

ContourExtraction extract_normalized_contour(const GrayImage& img, const BBox& box,
                                             Binarization method = Binarization::otsu());

}  // namespace selfsim

namespace selfsim {

/// Which frame both contours are divided by before comparing them.
enum class Normalization {
  OwnCrop,  // each contour by its own crop's width/height
  GtCrop,   // both by the reference (ground-truth) crop's width/height
};

/// Symmetric HD between two extractions after normalization; +inf when
/// either side has no contour.
HDResult normalized_hausdorff(const PixelExtraction& candidate,
                              const PixelExtraction& reference,
                              Normalization normalization = Normalization::OwnCrop);

}  // namespace selfsim
