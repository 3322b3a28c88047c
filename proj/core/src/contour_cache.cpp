#include "selfsim/contour_cache.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "selfsim/errors.hpp"

namespace selfsim {

using nlohmann::json;

std::optional<PixelExtraction> ContourCache::find(const ContourKey& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ContourCache::insert(const ContourKey& key, const PixelExtraction& value) {
  std::unique_lock lock(mutex_);
  entries_.insert_or_assign(key, value);
}

std::size_t ContourCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void ContourCache::save(const std::filesystem::path& path) const {
  json entries = json::array();
  {
    std::shared_lock lock(mutex_);
    for (const auto& [key, value] : entries_) {
      json points = nullptr;
      if (value.contour) {
        points = json::array();
        for (const Point& p : value.contour->points()) {
          points.push_back({static_cast<long long>(p.x), static_cast<long long>(p.y)});
        }
      }
      entries.push_back({{"image_id", key.image_id},
                         {"box", {key.box.x, key.box.y, key.box.w, key.box.h}},
                         {"binarize", key.binarization},
                         {"crop", {value.crop_w, value.crop_h}},
                         {"area", value.foreground_area},
                         {"points", std::move(points)}});
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write contour cache " + path.string());
  out << json{{"version", 1}, {"entries", std::move(entries)}}.dump() << '\n';
  if (!out) throw DataError("failed writing contour cache " + path.string());
}

ContourCache ContourCache::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open contour cache " + path.string());
  ContourCache cache;
  std::size_t i = 0;
  try {
    const json doc = json::parse(in);
    if (doc.at("version").get<int>() != 1) throw DataError("unsupported contour cache version");
    for (const json& e : doc.at("entries")) {
      ContourKey key;
      key.image_id = e.at("image_id").get<ImageId>();
      const auto& b = e.at("box");
      key.box = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                 b.at(3).get<double>()};
      key.binarization = e.at("binarize").get<std::string>();
      PixelExtraction value;
      value.crop_w = e.at("crop").at(0).get<int>();
      value.crop_h = e.at("crop").at(1).get<int>();
      value.foreground_area = e.at("area").get<std::size_t>();
      if (!e.at("points").is_null()) {
        std::vector<Point> pts;
        for (const json& p : e.at("points")) {
          pts.push_back({static_cast<double>(p.at(0).get<long long>()),
                         static_cast<double>(p.at(1).get<long long>())});
        }
        value.contour = Contour(std::move(pts), value.crop_w, value.crop_h);
      }
      cache.entries_.emplace(std::move(key), std::move(value));
      ++i;
    }
  } catch (const json::exception& e) {
    throw DataError("malformed contour cache " + path.string() + " at $.entries[" +
                    std::to_string(i) + "]: " + e.what());
  } catch (const ContractViolation& e) {
    throw DataError("malformed contour cache " + path.string() + " at $.entries[" +
                    std::to_string(i) + "]: " + e.what());
  }
  return cache;
}

PixelExtraction extract_or_absent(const GrayImage& img, const BBox& box, Binarization method) {
  if (!is_valid(box) || crop_rect(img.width(), img.height(), box).empty()) return {};
  return extract_pixel_contour(img, box, method);
}

CachingContourSource::CachingContourSource(ImageLoader loader, ContourCache* cache,
                                           Binarization binarization)
    : loader_(std::move(loader)), cache_(cache), binarization_(binarization) {}

std::shared_ptr<const GrayImage> CachingContourSource::image(ImageId id) {
  std::lock_guard lock(images_mutex_);
  auto it = images_.find(id);
  if (it != images_.end()) return it->second;
  auto img = std::make_shared<const GrayImage>(loader_(id));
  images_.emplace(id, img);
  return img;
}

PixelExtraction CachingContourSource::extract(ImageId image_id, const BBox& box) {
  const ContourKey key{image_id, box, binarization_.to_string()};
  if (cache_ != nullptr) {
    if (auto hit = cache_->find(key)) {
      ++hits_;
      return *hit;
    }
  }
  if (!loader_) {
    throw DataError("images required for AP-ss (contour cache has no entry for image " +
                    std::to_string(image_id) + ")");
  }
  PixelExtraction value = extract_or_absent(*image(image_id), box, binarization_);
  ++extractions_;
  if (cache_ != nullptr) cache_->insert(key, value);
  return value;
}

}  // namespace selfsim
