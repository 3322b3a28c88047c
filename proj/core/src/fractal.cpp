#include "selfsim/fractal.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "selfsim/errors.hpp"
#include "selfsim/rng.hpp"

namespace selfsim {

namespace {

struct Tri {
  Point a, b, c;
};

Point mid(const Point& p, const Point& q) { return {(p.x + q.x) / 2.0, (p.y + q.y) / 2.0}; }

void set_clamped(BinaryMask& m, double x, double y) {
  const int px = std::clamp(static_cast<int>(std::floor(x)), 0, m.width() - 1);
  const int py = std::clamp(static_cast<int>(std::floor(y)), 0, m.height() - 1);
  m.set(px, py);
}

void fill_triangle(BinaryMask& m, const Tri& t) {
  const double den = (t.b.y - t.c.y) * (t.a.x - t.c.x) + (t.c.x - t.b.x) * (t.a.y - t.c.y);
  if (den == 0.0) return;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min({t.a.x, t.b.x, t.c.x}))));
  const int x1 = std::min(m.width() - 1, static_cast<int>(std::ceil(std::max({t.a.x, t.b.x, t.c.x}))));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min({t.a.y, t.b.y, t.c.y}))));
  const int y1 = std::min(m.height() - 1, static_cast<int>(std::ceil(std::max({t.a.y, t.b.y, t.c.y}))));
  constexpr double eps = 1e-12;
  for (int y = y0; y <= y1; ++y) {
    const double py = y + 0.5;
    for (int x = x0; x <= x1; ++x) {
      const double px = x + 0.5;
      const double l0 = ((t.b.y - t.c.y) * (px - t.c.x) + (t.c.x - t.b.x) * (py - t.c.y)) / den;
      const double l1 = ((t.c.y - t.a.y) * (px - t.c.x) + (t.a.x - t.c.x) * (py - t.c.y)) / den;
      const double l2 = 1.0 - l0 - l1;
      if (l0 >= -eps && l1 >= -eps && l2 >= -eps) m.set(x, y);
    }
  }

  // Walk from each corner part of the way to the centroid. Neighbouring
  // leaves share corners, so their rasters meet in the corner pixel.
  const Point g{(t.a.x + t.b.x + t.c.x) / 3.0, (t.a.y + t.b.y + t.c.y) / 3.0};
  for (const Point& v : {t.a, t.b, t.c}) {
    const double len = std::hypot(g.x - v.x, g.y - v.y) * 0.4;
    const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.25)));
    for (int i = 0; i <= steps; ++i) {
      const double s = 0.4 * static_cast<double>(i) / steps;
      set_clamped(m, v.x + s * (g.x - v.x), v.y + s * (g.y - v.y));
    }
  }
}

void subdivide(BinaryMask& m, const Tri& t, int depth) {
  if (depth == 0) {
    fill_triangle(m, t);
    return;
  }
  const Point ab = mid(t.a, t.b);
  const Point bc = mid(t.b, t.c);
  const Point ca = mid(t.c, t.a);
  subdivide(m, {t.a, ab, ca}, depth - 1);
  subdivide(m, {ab, t.b, bc}, depth - 1);
  subdivide(m, {ca, bc, t.c}, depth - 1);
}

}  // namespace

BinaryMask rasterize_sierpinski(int depth, int width, int height) {
  if (depth < 0) throw ContractViolation("sierpinski: negative depth");
  if (width <= 0 || height <= 0) throw ContractViolation("sierpinski: non-positive size");
  if (depth >= 30 || std::min(width, height) < (1 << depth)) {
    throw ContractViolation("sierpinski: size must be at least 2^depth");
  }
  BinaryMask m(width, height);
  const double w = width;
  const double h = height;
  subdivide(m, {{w / 2.0, 0.0}, {0.0, h}, {w, h}}, depth);
  return m;
}

BinaryMask gen_sierpinski(int depth, int size) { return rasterize_sierpinski(depth, size, size); }

std::vector<BBox> sierpinski_subregions(int width, int height) {
  const double w = width;
  const double h = height;
  return {
      BBox::from_corner(w / 4.0, 0.0, w / 2.0, h / 2.0),
      BBox::from_corner(0.0, h / 2.0, w / 2.0, h / 2.0),
      BBox::from_corner(w / 2.0, h / 2.0, w / 2.0, h / 2.0),
  };
}

namespace {

double lattice(std::uint64_t seed, int octave, int ix, int iy) {
  std::uint64_t v = seed;
  v = hash64(v ^ (static_cast<std::uint64_t>(octave) * 0x100000001B3ULL));
  v = hash64(v ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)));
  v = hash64(v ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy)) << 32));
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(std::uint64_t seed, int octave, double x, double y) {
  const int ix = static_cast<int>(std::floor(x));
  const int iy = static_cast<int>(std::floor(y));
  const double fx = smoothstep(x - ix);
  const double fy = smoothstep(y - iy);
  const double v00 = lattice(seed, octave, ix, iy);
  const double v10 = lattice(seed, octave, ix + 1, iy);
  const double v01 = lattice(seed, octave, ix, iy + 1);
  const double v11 = lattice(seed, octave, ix + 1, iy + 1);
  const double top = v00 + (v10 - v00) * fx;
  const double bot = v01 + (v11 - v01) * fx;
  return top + (bot - top) * fy;
}

}  // namespace

GrayImage gen_plume(std::uint64_t seed, int width, int height, int octaves) {
  if (octaves < 1) throw ContractViolation("plume: octaves must be >= 1");
  if (width <= 0 || height <= 0) throw ContractViolation("plume: non-positive size");
  GrayImage img(width, height);
  constexpr double kBaseCells = 3.0;
  double norm = 0.0;
  for (int o = 0; o < octaves; ++o) norm += std::ldexp(1.0, -o);

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = (x + 0.5) / width;
      const double v = (y + 0.5) / height;
      double n = 0.0;
      for (int o = 0; o < octaves; ++o) {
        const double freq = kBaseCells * std::ldexp(1.0, o);
        n += std::ldexp(1.0, -o) * value_noise(seed, o, u * freq, v * freq);
      }
      n /= norm;  // [0, 1]
      // Elliptical fade: full strength in the core, zero at the box edge.
      const double r = std::hypot((u - 0.5) * 2.0, (v - 0.5) * 2.0);
      const double fade = 1.0 - smoothstep(std::clamp((r - 0.35) / 0.65, 0.0, 1.0));
      const double value = fade * (0.35 + 0.65 * n);
      img.at(x, y) = static_cast<std::uint8_t>(std::lround(std::clamp(value, 0.0, 1.0) * 255.0));
    }
  }
  return img;
}

GrayImage gen_plume(std::uint64_t seed, int size, int octaves) {
  return gen_plume(seed, size, size, octaves);
}

BinaryMask gen_disk(int width, int height) {
  BinaryMask m(width, height);
  const double cx = width / 2.0;
  const double cy = height / 2.0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = (x + 0.5 - cx) / cx;
      const double dy = (y + 0.5 - cy) / cy;
      if (dx * dx + dy * dy <= 1.0) m.set(x, y);
    }
  }
  return m;
}

std::string to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::Sierpinski: return "sierpinski";
    case ObjectKind::Plume: return "plume";
    case ObjectKind::Solid: return "solid";
  }
  return "solid";
}

ObjectKind parse_object_kind(const std::string& name) {
  if (name == "sierpinski") return ObjectKind::Sierpinski;
  if (name == "plume") return ObjectKind::Plume;
  if (name == "solid") return ObjectKind::Solid;
  throw DataError("unknown object kind '" + name + "'");
}

namespace {

constexpr std::uint8_t kSierpinskiLevel = 255;
constexpr std::uint8_t kSolidLevel = 220;

bool overlaps(const PixelRect& a, const PixelRect& b) {
  return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

BBox to_bbox(const PixelRect& r) {
  return BBox::from_corner(r.x0, r.y0, r.width(), r.height());
}

void stamp(GrayImage& img, const PixelRect& at, const BinaryMask& m, std::uint8_t level) {
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m.get(x, y)) img.at(at.x0 + x, at.y0 + y) = level;
    }
  }
}

}  // namespace

SyntheticScene compose_scene(const SceneSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) throw DataError("scene: non-positive size");
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    const PixelRect& r = spec.objects[i].placement;
    if (r.empty()) throw DataError("scene: object " + std::to_string(i) + " has an empty placement");
    if (r.x0 < 0 || r.y0 < 0 || r.x1 > spec.width || r.y1 > spec.height) {
      throw DataError("scene: object " + std::to_string(i) + " lies outside the scene");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (overlaps(r, spec.objects[j].placement)) {
        throw DataError("scene: objects " + std::to_string(j) + " and " + std::to_string(i) +
                        " overlap");
      }
    }
  }

  SyntheticScene scene;
  scene.image = GrayImage(spec.width, spec.height, 0);
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    const ObjectSpec& obj = spec.objects[i];
    const PixelRect& r = obj.placement;
    const BBox whole = to_bbox(r);
    std::vector<BBox> regions;

    switch (obj.kind) {
      case ObjectKind::Sierpinski: {
        stamp(scene.image, r, rasterize_sierpinski(obj.depth, r.width(), r.height()),
              kSierpinskiLevel);
        for (const BBox& b : sierpinski_subregions(r.width(), r.height())) {
          regions.push_back({b.x + r.x0, b.y + r.y0, b.w, b.h});
        }
        break;
      }
      case ObjectKind::Plume: {
        std::uint64_t s = spec.seed ^ (0xA5A5A5A5ULL + i);
        const GrayImage plume = gen_plume(splitmix64(s), r.width(), r.height(), obj.octaves);
        std::array<double, 4> mass{};
        const int hw = r.width() / 2;
        const int hh = r.height() / 2;
        for (int y = 0; y < plume.height(); ++y) {
          for (int x = 0; x < plume.width(); ++x) {
            const std::uint8_t v = plume.at(x, y);
            auto& dst = scene.image.at(r.x0 + x, r.y0 + y);
            dst = std::max(dst, v);
            mass[(y >= hh ? 2 : 0) + (x >= hw ? 1 : 0)] += v;
          }
        }
        const auto densest = static_cast<int>(std::max_element(mass.begin(), mass.end()) - mass.begin());
        const double qw = r.width() / 2.0;
        const double qh = r.height() / 2.0;
        regions.push_back(BBox::from_corner(r.x0 + (densest % 2) * qw, r.y0 + (densest / 2) * qh,
                                            qw, qh));
        break;
      }
      case ObjectKind::Solid:
        stamp(scene.image, r, gen_disk(r.width(), r.height()), kSolidLevel);
        break;
    }

    scene.gts.push_back({spec.image_id, obj.class_id, whole});
    scene.fractal_regions.push_back(std::move(regions));
    scene.kinds.push_back(obj.kind);
  }
  return scene;
}

SceneSpec random_scene_spec(std::uint64_t seed, ImageId image_id, int width, int height,
                            int count, const std::vector<ObjectKind>& kinds,
                            const std::vector<ClassId>& classes, int min_side, int max_side) {
  if (kinds.empty() || classes.size() != kinds.size()) {
    throw ContractViolation("random_scene_spec: kinds and classes must be non-empty and aligned");
  }
  if (min_side <= 0 || max_side < min_side || max_side > std::min(width, height)) {
    throw ContractViolation("random_scene_spec: invalid side range");
  }
  Rng rng(seed);
  SceneSpec spec;
  spec.seed = seed;
  spec.image_id = image_id;
  spec.width = width;
  spec.height = height;
  constexpr int kGap = 4;
  constexpr int kAttempts = 200;
  for (int i = 0; i < count; ++i) {
    const std::size_t k = static_cast<std::size_t>(i) % kinds.size();
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
      const int side = min_side + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_side - min_side + 1)));
      const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(width - side + 1)));
      const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(height - side + 1)));
      const PixelRect r{x0, y0, x0 + side, y0 + side};
      const PixelRect padded{r.x0 - kGap, r.y0 - kGap, r.x1 + kGap, r.y1 + kGap};
      const bool clash = std::any_of(spec.objects.begin(), spec.objects.end(),
                                     [&](const ObjectSpec& o) { return overlaps(padded, o.placement); });
      if (clash) continue;
      ObjectSpec obj;
      obj.kind = kinds[k];
      obj.class_id = classes[k];
      obj.placement = r;
      int depth = 0;
      while (depth < 5 && side >= (1 << (depth + 4))) ++depth;
      obj.depth = depth;
      spec.objects.push_back(obj);
      break;
    }
  }
  return spec;
}

}  // namespace selfsim
