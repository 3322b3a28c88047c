#include "selfsim/mask.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <utility>

#include "selfsim/errors.hpp"

namespace selfsim {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw ContractViolation("GrayImage: non-positive size");
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) throw ContractViolation("GrayImage: non-positive size");
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ContractViolation("GrayImage: pixel count does not match width * height");
  }
}

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw ContractViolation("BinaryMask: non-positive size");
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

PixelRect crop_rect(int image_w, int image_h, const BBox& box) noexcept {
  auto round_half_up = [](double v) { return static_cast<long long>(std::floor(v + 0.5)); };
  const long long x0 = std::max(0LL, round_half_up(box.left()));
  const long long y0 = std::max(0LL, round_half_up(box.top()));
  const long long x1 = std::min<long long>(image_w, round_half_up(box.right()));
  const long long y1 = std::min<long long>(image_h, round_half_up(box.bottom()));
  if (x1 <= x0 || y1 <= y0) return {};
  return {static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x1),
          static_cast<int>(y1)};
}

GrayImage crop(const GrayImage& img, const BBox& box) {
  if (!is_valid(box)) throw DataError("empty crop: invalid box");
  const PixelRect r = crop_rect(img.width(), img.height(), box);
  if (r.empty()) throw DataError("empty crop");
  GrayImage out(r.width(), r.height());
  for (int y = 0; y < r.height(); ++y) {
    const auto* src = img.pixels().data() +
                      static_cast<std::size_t>(r.y0 + y) * static_cast<std::size_t>(img.width()) +
                      r.x0;
    std::copy(src, src + r.width(),
              out.pixels().begin() + static_cast<std::ptrdiff_t>(y) * r.width());
  }
  return out;
}

std::string Binarization::to_string() const {
  if (method == Method::Otsu) return "otsu";
  return "fixed:" + std::to_string(threshold);
}

Binarization Binarization::parse(const std::string& text) {
  if (text == "otsu") return otsu();
  constexpr std::string_view prefix = "fixed:";
  if (text.rfind(prefix, 0) == 0) {
    int t = 0;
    const char* first = text.data() + prefix.size();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, t);
    if (ec == std::errc{} && ptr == last && first != last && t >= 0 && t <= 256) {
      return fixed(t);
    }
  }
  throw DataError("unknown binarization '" + text + "' (expected otsu or fixed:<0..256>)");
}

int otsu_threshold(const GrayImage& img) {
  std::array<double, 256> hist{};
  for (std::uint8_t v : img.pixels()) hist[v] += 1.0;

  const double total = static_cast<double>(img.pixels().size());
  double total_sum = 0.0;
  for (int i = 0; i < 256; ++i) total_sum += i * hist[i];

  double w0 = 0.0;
  double sum0 = 0.0;
  double best_var = 0.0;
  int best_t = 256;
  for (int t = 1; t < 256; ++t) {
    w0 += hist[t - 1];
    sum0 += (t - 1) * hist[t - 1];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (total_sum - sum0) / w1;
    const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (var > best_var) {
      best_var = var;
      best_t = t;
    }
  }
  return best_t;
}

BinaryMask binarize(const GrayImage& img, Binarization method) {
  if (img.empty()) throw ContractViolation("binarize: empty image");
  const int t = method.method == Binarization::Method::Otsu ? otsu_threshold(img)
                                                            : method.threshold;
  BinaryMask mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.at(x, y) >= t) mask.set(x, y);
    }
  }
  return mask;
}

BinaryMask max_component(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  if (w == 0 || h == 0) return mask;

  std::vector<int> label(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
  std::vector<std::pair<int, int>> stack;
  int best_label = -1;
  std::size_t best_area = 0;
  int next_label = 0;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!mask.get(x, y) || label[idx] >= 0) continue;
      const int id = next_label++;
      std::size_t area = 0;
      label[idx] = id;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        ++area;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (!mask.get_or_background(nx, ny)) continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
            if (label[nidx] >= 0) continue;
            label[nidx] = id;
            stack.emplace_back(nx, ny);
          }
        }
      }
      // Raster discovery order makes strict '>' implement the tie-break.
      if (area > best_area) {
        best_area = area;
        best_label = id;
      }
    }
  }

  BinaryMask out(w, h);
  if (best_label < 0) return out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (label[static_cast<std::size_t>(y) * w + x] == best_label) out.set(x, y);
    }
  }
  return out;
}

namespace {

// Clockwise on screen (y grows downward), starting east.
constexpr std::array<std::pair<int, int>, 8> kDirs = {{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1},
}};
constexpr int kWest = 4;

int dir_index(int dx, int dy) {
  for (int i = 0; i < 8; ++i) {
    if (kDirs[i].first == dx && kDirs[i].second == dy) return i;
  }
  return -1;
}

struct Step {
  int x, y;        // next boundary pixel
  int backtrack;   // direction from it to the last background cell examined
};

std::optional<Step> moore_step(const BinaryMask& m, int px, int py, int backtrack) {
  for (int k = 1; k <= 8; ++k) {
    const int d = (backtrack + k) % 8;
    const int qx = px + kDirs[d].first;
    const int qy = py + kDirs[d].second;
    if (!m.get_or_background(qx, qy)) continue;
    const int prev = (d + 7) % 8;
    const int cx = px + kDirs[prev].first;
    const int cy = py + kDirs[prev].second;
    return Step{qx, qy, dir_index(cx - qx, cy - qy)};
  }
  return std::nullopt;
}

}  // namespace

Contour trace_outer_contour(const BinaryMask& component) {
  int sx = -1;
  int sy = -1;
  for (int y = 0; y < component.height() && sx < 0; ++y) {
    for (int x = 0; x < component.width(); ++x) {
      if (component.get(x, y)) {
        sx = x;
        sy = y;
        break;
      }
    }
  }
  if (sx < 0) throw DataError("no foreground");

  const double fw = component.width();
  const double fh = component.height();
  std::vector<Point> pts{{static_cast<double>(sx), static_cast<double>(sy)}};

  const auto first = moore_step(component, sx, sy, kWest);
  if (!first) return Contour(std::move(pts), fw, fh);

  // Each boundary pixel is entered at most 4 times by an outer trace.
  const std::size_t limit = 4 * component.count() + 8;
  Step cur = *first;
  while (pts.size() <= limit) {
    if (cur.x == sx && cur.y == sy) {
      const auto next = moore_step(component, sx, sy, cur.backtrack);
      if (next->x == first->x && next->y == first->y) break;
      pts.push_back({static_cast<double>(sx), static_cast<double>(sy)});
      cur = *next;
      continue;
    }
    pts.push_back({static_cast<double>(cur.x), static_cast<double>(cur.y)});
    cur = *moore_step(component, cur.x, cur.y, cur.backtrack);
  }
  return Contour(std::move(pts), fw, fh);
}

PixelExtraction extract_pixel_contour(const GrayImage& img, const BBox& box,
                                      Binarization method) {
  const GrayImage region = crop(img, box);
  const BinaryMask component = max_component(binarize(region, method));
  PixelExtraction out;
  out.crop_w = region.width();
  out.crop_h = region.height();
  out.foreground_area = component.count();
  if (out.foreground_area > 0) out.contour = trace_outer_contour(component);
  return out;
}

ContourExtraction extract_normalized_contour(const GrayImage& img, const BBox& box,
                                             Binarization method) {
  PixelExtraction px = extract_pixel_contour(img, box, method);
  ContourExtraction out;
  out.foreground_area = px.foreground_area;
  if (px.contour) out.contour = normalize_contour(*px.contour);
  return out;
}

}  // namespace selfsim

namespace selfsim {

HDResult normalized_hausdorff(const PixelExtraction& candidate,
                              const PixelExtraction& reference,
                              Normalization normalization) {
  if (!candidate.contour || !reference.contour) return HDResult::absent();
  if (normalization == Normalization::OwnCrop) {
    return hausdorff(normalize_contour(*candidate.contour),
                     normalize_contour(*reference.contour));
  }
  const double w = reference.crop_w;
  const double h = reference.crop_h;
  return hausdorff(normalize_contour_to(*candidate.contour, w, h),
                   normalize_contour_to(*reference.contour, w, h));
}

}  // namespace selfsim
