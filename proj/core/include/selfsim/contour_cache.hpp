#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <unordered_map>

#include "selfsim/detection.hpp"
#include "selfsim/mask.hpp"

namespace selfsim {

/// Produces the raw (pixel-space) contour of a box inside an image. Must be
/// callable from several threads at once.
class ContourSource {
 public:
  virtual ~ContourSource() = default;
  virtual PixelExtraction extract(ImageId image, const BBox& box) = 0;
};

struct ContourKey {
  ImageId image_id = 0;
  BBox box;
  std::string binarization;

  auto tie() const { return std::tie(image_id, box.x, box.y, box.w, box.h, binarization); }
  friend bool operator<(const ContourKey& a, const ContourKey& b) { return a.tie() < b.tie(); }
  friend bool operator==(const ContourKey& a, const ContourKey& b) { return a.tie() == b.tie(); }
};

/// Persistent extraction cache keyed by (image, box, binarization). Entries
/// hold integer pixel contours, so a hit is bit-identical to recomputing.
/// Concurrent readers share a lock; inserts take it exclusively.
class ContourCache {
 public:
  ContourCache() = default;
  // Moving is not synchronized; only move caches no other thread can see.
  ContourCache(ContourCache&& other) noexcept : entries_(std::move(other.entries_)) {}
  ContourCache& operator=(ContourCache&& other) noexcept {
    entries_ = std::move(other.entries_);
    return *this;
  }

  std::optional<PixelExtraction> find(const ContourKey& key) const;
  void insert(const ContourKey& key, const PixelExtraction& value);
  std::size_t size() const;

  /// Throws DataError on unreadable or malformed files.
  static ContourCache load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<ContourKey, PixelExtraction> entries_;
};

using ImageLoader = std::function<GrayImage(ImageId)>;

/// Cache in front of on-demand extraction from images. Either piece may be
/// missing: without a loader every lookup must hit the cache; without a
/// cache every lookup extracts. Loaded images are kept in memory.
class CachingContourSource final : public ContourSource {
 public:
  CachingContourSource(ImageLoader loader, ContourCache* cache, Binarization binarization);

  PixelExtraction extract(ImageId image, const BBox& box) override;

  std::size_t extractions() const noexcept { return extractions_.load(); }
  std::size_t cache_hits() const noexcept { return hits_.load(); }

 private:
  std::shared_ptr<const GrayImage> image(ImageId id);

  ImageLoader loader_;
  ContourCache* cache_;
  Binarization binarization_;
  std::mutex images_mutex_;
  std::unordered_map<ImageId, std::shared_ptr<const GrayImage>> images_;
  std::atomic<std::size_t> extractions_{0};
  std::atomic<std::size_t> hits_{0};
};

/// extract_pixel_contour, except that a box missing the image yields an
/// absent contour instead of an error.
PixelExtraction extract_or_absent(const GrayImage& img, const BBox& box, Binarization method);

}  // namespace selfsim
