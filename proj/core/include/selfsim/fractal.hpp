#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selfsim/detection.hpp"
#include "selfsim/mask.hpp"

namespace selfsim {

/// Sierpinski triangle inscribed in a width x height box: apex at the top
/// center, base along the bottom edge. depth 0 is the filled triangle.
/// Leaves are sampled at pixel centers, and each leaf is joined to its
/// corner pixels so that touching sub-triangles stay 8-connected.
BinaryMask rasterize_sierpinski(int depth, int width, int height);

/// Square version. Requires size >= 2^depth.
BinaryMask gen_sierpinski(int depth, int size);

/// Bounding boxes (in the generator's pixel frame) of the three top-level
/// sub-triangles: top, bottom-left, bottom-right.
std::vector<BBox> sierpinski_subregions(int width, int height);

/// Multi-octave value noise (persistence 0.5) with a radial fade. The same
/// seed always yields the same bytes. Requires octaves >= 1.
GrayImage gen_plume(std::uint64_t seed, int size, int octaves);
GrayImage gen_plume(std::uint64_t seed, int width, int height, int octaves);

/// Filled ellipse inscribed in width x height.
BinaryMask gen_disk(int width, int height);

enum class ObjectKind { Sierpinski, Plume, Solid };

std::string to_string(ObjectKind kind);
/// Throws DataError for unknown names.
ObjectKind parse_object_kind(const std::string& name);

struct ObjectSpec {
  ObjectKind kind = ObjectKind::Solid;
  PixelRect placement;  // half-open, scene pixels
  ClassId class_id = 0;
  int depth = 4;        // Sierpinski recursion depth
  int octaves = 4;      // plume noise octaves
};

struct SceneSpec {
  std::uint64_t seed = 0;
  ImageId image_id = 0;
  int width = 0;
  int height = 0;
  std::vector<ObjectSpec> objects;
};

struct SyntheticScene {
  GrayImage image;
  std::vector<GroundTruth> gts;
  /// Per ground truth: sub-boxes that are fractals of the whole object.
  std::vector<std::vector<BBox>> fractal_regions;
  std::vector<ObjectKind> kinds;
};

/// Renders objects onto a black background. Throws DataError on placements
/// outside the scene, overlapping placements, or non-positive sizes.
SyntheticScene compose_scene(const SceneSpec& spec);

/// Random non-overlapping layout of `count` objects cycling through `kinds`
/// and `classes`, each a square of side in [min_side, max_side].
SceneSpec random_scene_spec(std::uint64_t seed, ImageId image_id, int width, int height,
                            int count, const std::vector<ObjectKind>& kinds,
                            const std::vector<ClassId>& classes, int min_side, int max_side);

}  // namespace selfsim
