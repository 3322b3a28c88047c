#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selfsim/geometry.hpp"

namespace selfsim {

using ImageId = std::int64_t;
using ClassId = std::int64_t;

struct Detection {
  ImageId image_id = 0;
  ClassId class_id = 0;
  BBox box;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct GroundTruth {
  ImageId image_id = 0;
  ClassId class_id = 0;
  BBox box;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct ImageInfo {
  ImageId id = 0;
  std::string file;
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageInfo&, const ImageInfo&) = default;
};

struct Category {
  ClassId id = 0;
  std::string name;
  bool self_similar = false;

  friend bool operator==(const Category&, const Category&) = default;
};

/// Images, categories and ground truth of one annotation file.
struct Dataset {
  std::vector<ImageInfo> images;
  std::vector<Category> categories;
  std::vector<GroundTruth> ground_truth;

  const ImageInfo* find_image(ImageId id) const noexcept;
  const Category* find_category(ClassId id) const noexcept;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

}  // namespace selfsim
