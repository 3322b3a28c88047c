#include "selfsim/formats.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "selfsim/errors.hpp"
#include "selfsim/toml_lite.hpp"

namespace selfsim {

using nlohmann::json;

namespace {

// A JSON value plus the path it was reached by, for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("schema error at " + path_ + ": " + what);
  }

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

  Node at(const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    auto it = j_.find(key);
    if (it == j_.end()) Node(j_, path_ + "." + key).fail("missing field");
    return Node(*it, path_ + "." + key);
  }

  Node item(std::size_t i) const { return Node(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  std::size_t array_size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  std::int64_t integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<std::int64_t>();
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  bool boolean() const {
    if (!j_.is_boolean()) fail("expected a boolean");
    return j_.get<bool>();
  }

 private:
  const json& j_;
  std::string path_;
};

// Corner box [x_min, y_min, w, h] with w, h > 0.
BBox corner_box(const Node& n) {
  if (n.array_size() != 4) n.fail("expected [x_min, y_min, w, h]");
  const double x = n.item(0).number();
  const double y = n.item(1).number();
  const double w = n.item(2).number();
  const double h = n.item(3).number();
  if (!(w > 0.0)) n.item(2).fail("box width must be positive");
  if (!(h > 0.0)) n.item(3).fail("box height must be positive");
  return BBox::from_corner(x, y, w, h);
}

json corner_json(const BBox& b) { return json::array({b.left(), b.top(), b.w, b.h}); }

// Accepts either a bare array or an object holding the array under `key`.
Node list_of(const json& doc, const char* key) {
  if (doc.is_array()) return Node(doc, "$");
  Node root(doc, "$");
  Node list = root.at(key);
  list.array_size();
  return list;
}

}  // namespace

Dataset parse_annotations(const json& doc) {
  Node root(doc, "$");
  Dataset ds;
  std::set<ImageId> image_ids;
  std::set<ClassId> class_ids;

  const Node images = root.at("images");
  for (std::size_t i = 0; i < images.array_size(); ++i) {
    const Node n = images.item(i);
    ImageInfo info;
    info.id = n.at("id").integer();
    info.file = n.at("file").string();
    info.width = static_cast<int>(n.at("width").integer());
    info.height = static_cast<int>(n.at("height").integer());
    if (info.width <= 0) n.at("width").fail("must be positive");
    if (info.height <= 0) n.at("height").fail("must be positive");
    if (!image_ids.insert(info.id).second) n.at("id").fail("duplicate image id");
    ds.images.push_back(std::move(info));
  }

  const Node cats = root.at("categories");
  for (std::size_t i = 0; i < cats.array_size(); ++i) {
    const Node n = cats.item(i);
    Category c;
    c.id = n.at("id").integer();
    c.name = n.at("name").string();
    c.self_similar = n.has("self_similar") ? n.at("self_similar").boolean() : false;
    if (!class_ids.insert(c.id).second) n.at("id").fail("duplicate category id");
    ds.categories.push_back(std::move(c));
  }

  const Node anns = root.at("annotations");
  for (std::size_t i = 0; i < anns.array_size(); ++i) {
    const Node n = anns.item(i);
    GroundTruth g;
    g.image_id = n.at("image_id").integer();
    g.class_id = n.at("category_id").integer();
    if (!image_ids.contains(g.image_id)) n.at("image_id").fail("unknown image id");
    if (!class_ids.contains(g.class_id)) n.at("category_id").fail("unknown category id");
    g.box = corner_box(n.at("bbox"));
    ds.ground_truth.push_back(g);
  }
  return ds;
}

json annotations_to_json(const Dataset& ds) {
  json images = json::array();
  for (const ImageInfo& i : ds.images) {
    images.push_back({{"id", i.id}, {"file", i.file}, {"width", i.width}, {"height", i.height}});
  }
  json cats = json::array();
  for (const Category& c : ds.categories) {
    cats.push_back({{"id", c.id}, {"name", c.name}, {"self_similar", c.self_similar}});
  }
  json anns = json::array();
  for (const GroundTruth& g : ds.ground_truth) {
    anns.push_back({{"image_id", g.image_id}, {"category_id", g.class_id}, {"bbox", corner_json(g.box)}});
  }
  return {{"images", images}, {"categories", cats}, {"annotations", anns}};
}

std::vector<Detection> parse_detections(const json& doc) {
  const Node list = list_of(doc, "detections");
  std::vector<Detection> out;
  for (std::size_t i = 0; i < list.array_size(); ++i) {
    const Node n = list.item(i);
    Detection d;
    d.image_id = n.at("image_id").integer();
    d.class_id = n.at("category_id").integer();
    d.box = corner_box(n.at("bbox"));
    d.score = n.at("score").number();
    if (d.score < 0.0 || d.score > 1.0) n.at("score").fail("score must lie in [0, 1]");
    out.push_back(d);
  }
  return out;
}

json detections_to_json(const std::vector<Detection>& dets) {
  json arr = json::array();
  for (const Detection& d : dets) {
    arr.push_back({{"image_id", d.image_id},
                   {"category_id", d.class_id},
                   {"bbox", corner_json(d.box)},
                   {"score", d.score}});
  }
  return arr;
}

std::vector<PairSpec> parse_pairs(const json& doc) {
  const Node list = list_of(doc, "pairs");
  std::vector<PairSpec> out;
  for (std::size_t i = 0; i < list.array_size(); ++i) {
    const Node n = list.item(i);
    PairSpec p;
    p.image = n.at("image").string();
    p.pred = corner_box(n.at("pred_bbox"));
    p.gt = corner_box(n.at("gt_bbox"));
    if (n.has("reference_bbox") && !n.at("reference_bbox").raw().is_null()) {
      p.reference = corner_box(n.at("reference_bbox"));
    }
    if (n.has("class_id")) p.class_id = n.at("class_id").integer();
    out.push_back(std::move(p));
  }
  return out;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": invalid JSON at byte " + std::to_string(e.byte));
  }
}

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

namespace {

template <typename F>
auto with_file(const std::filesystem::path& path, F&& parse) {
  const json doc = read_json(path);
  try {
    return parse(doc);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace

Dataset load_annotations(const std::filesystem::path& path) {
  return with_file(path, [](const json& d) { return parse_annotations(d); });
}

std::vector<Detection> load_detections(const std::filesystem::path& path) {
  return with_file(path, [](const json& d) { return parse_detections(d); });
}

std::vector<PairSpec> load_pairs(const std::filesystem::path& path) {
  return with_file(path, [](const json& d) { return parse_pairs(d); });
}

json contour_to_json(const std::optional<Contour>& contour, std::size_t foreground_area,
                     int crop_w, int crop_h) {
  json doc = {{"width", crop_w}, {"height", crop_h}, {"foreground_area", foreground_area}};
  if (!contour) {
    doc["space"] = nullptr;
    doc["points"] = nullptr;
    return doc;
  }
  doc["space"] = contour->space() == CoordinateSpace::Normalized ? "normalized" : "pixel";
  json pts = json::array();
  for (const Point& p : contour->points()) pts.push_back({p.x, p.y});
  doc["points"] = std::move(pts);
  return doc;
}

json report_to_json(const EvalReport& r) {
  json classes = json::array();
  for (const ClassReport& c : r.classes) {
    json pr = json::array();
    for (const PrPoint& p : c.curve) pr.push_back({p.recall, p.precision});
    classes.push_back({{"id", c.id},
                       {"name", c.name},
                       {"ap", c.ap},
                       {"recall", c.recall},
                       {"n_gt", c.n_gt},
                       {"tp", c.tp},
                       {"fp", c.fp},
                       {"fn", c.fn},
                       {"pr", std::move(pr)}});
  }
  return {{"mode", to_string(r.mode)}, {"map", r.map},   {"recall", r.recall}, {"tp", r.tp},
          {"fp", r.fp},                {"fn", r.fn},     {"classes", std::move(classes)}};
}

std::string report_to_text(const EvalReport& r) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "mode %s  mAP %.4f  recall %.4f  tp %zu  fp %zu  fn %zu\n",
                to_string(r.mode).c_str(), r.map, r.recall, r.tp, r.fp, r.fn);
  out << line;
  std::snprintf(line, sizeof line, "%-16s %8s %8s %6s %6s %6s %6s\n", "class", "AP", "recall", "n_gt",
                "tp", "fp", "fn");
  out << line;
  for (const ClassReport& c : r.classes) {
    std::snprintf(line, sizeof line, "%-16s %8.4f %8.4f %6zu %6zu %6zu %6zu\n", c.name.c_str(), c.ap,
                  c.recall, c.n_gt, c.tp, c.fp, c.fn);
    out << line;
  }
  return out.str();
}

GateSemantics parse_semantics(const std::string& text) {
  if (text == "prose") return GateSemantics::Prose;
  if (text == "literal") return GateSemantics::LiteralEquation;
  throw DataError("unknown gate semantics '" + text + "' (expected prose or literal)");
}

Normalization parse_normalization(const std::string& text) {
  if (text == "own-crop") return Normalization::OwnCrop;
  if (text == "gt-crop") return Normalization::GtCrop;
  throw DataError("unknown normalization '" + text + "' (expected own-crop or gt-crop)");
}

SimConfig sim_config_from_toml(const json& doc) {
  const Node root(doc, "$");
  SimConfig cfg;
  if (root.has("seed")) cfg.seed = static_cast<std::uint64_t>(root.at("seed").integer());
  if (root.has("epochs")) cfg.epochs = static_cast<int>(root.at("epochs").integer());
  if (root.has("ap_m")) cfg.ap_m = root.at("ap_m").number();
  if (root.has("threads")) cfg.threads = static_cast<unsigned>(root.at("threads").integer());

  if (root.has("schedule")) {
    const Node s = root.at("schedule");
    NoiseSchedule& n = cfg.schedule;
    if (s.has("jitter_start")) n.jitter_start = s.at("jitter_start").number();
    if (s.has("jitter_end")) n.jitter_end = s.at("jitter_end").number();
    if (s.has("fractal_prob")) n.fractal_prob = s.at("fractal_prob").number();
    if (s.has("miss_prob")) n.miss_prob = s.at("miss_prob").number();
    if (s.has("fp_rate")) n.fp_rate = s.at("fp_rate").number();
  }

  if (root.has("gate")) {
    const Node g = root.at("gate");
    if (g.has("th_hd")) cfg.gate.th_hd = g.at("th_hd").number();
    if (g.has("iou_gate")) cfg.gate.iou_gate = g.at("iou_gate").number();
    if (g.has("semantics")) cfg.gate.semantics = parse_semantics(g.at("semantics").string());
    if (g.has("binarize")) cfg.gate.binarization = Binarization::parse(g.at("binarize").string());
    if (g.has("normalization")) {
      cfg.gate.normalization = parse_normalization(g.at("normalization").string());
    }
  }

  std::vector<std::pair<ObjectKind, ClassId>> kinds;
  const Node cats = root.at("category");
  for (std::size_t i = 0; i < cats.array_size(); ++i) {
    const Node c = cats.item(i);
    Category cat;
    cat.id = c.at("id").integer();
    cat.name = c.at("name").string();
    cat.self_similar = c.has("self_similar") ? c.at("self_similar").boolean() : false;
    if (c.has("kind")) kinds.emplace_back(parse_object_kind(c.at("kind").string()), cat.id);
    cfg.categories.push_back(std::move(cat));
  }

  if (root.has("scene")) {
    const Node scenes = root.at("scene");
    for (std::size_t i = 0; i < scenes.array_size(); ++i) {
      const Node s = scenes.item(i);
      SceneSpec spec;
      spec.seed = s.has("seed") ? static_cast<std::uint64_t>(s.at("seed").integer()) : cfg.seed + i;
      spec.image_id = s.has("image_id") ? s.at("image_id").integer() : static_cast<ImageId>(i + 1);
      spec.width = static_cast<int>(s.at("width").integer());
      spec.height = static_cast<int>(s.at("height").integer());
      if (s.has("object")) {
        const Node objs = s.at("object");
        for (std::size_t k = 0; k < objs.array_size(); ++k) {
          const Node o = objs.item(k);
          ObjectSpec obj;
          obj.kind = parse_object_kind(o.at("kind").string());
          const Node b = o.at("box");
          if (b.array_size() != 4) b.fail("expected [x_min, y_min, w, h]");
          const int x = static_cast<int>(b.item(0).integer());
          const int y = static_cast<int>(b.item(1).integer());
          const int w = static_cast<int>(b.item(2).integer());
          const int h = static_cast<int>(b.item(3).integer());
          if (w <= 0 || h <= 0) b.fail("box size must be positive");
          obj.placement = {x, y, x + w, y + h};
          obj.class_id = o.at("class_id").integer();
          if (o.has("depth")) obj.depth = static_cast<int>(o.at("depth").integer());
          if (o.has("octaves")) obj.octaves = static_cast<int>(o.at("octaves").integer());
          spec.objects.push_back(obj);
        }
      }
      cfg.scenes.push_back(std::move(spec));
    }
  }

  if (root.has("scene_gen")) {
    const Node g = root.at("scene_gen");
    if (kinds.empty()) g.fail("scene_gen needs categories with a 'kind'");
    std::vector<ObjectKind> k;
    std::vector<ClassId> c;
    for (const auto& [kind, id] : kinds) {
      k.push_back(kind);
      c.push_back(id);
    }
    const int count = static_cast<int>(g.at("count").integer());
    const int width = static_cast<int>(g.at("width").integer());
    const int height = static_cast<int>(g.at("height").integer());
    const int objects = static_cast<int>(g.at("objects").integer());
    const int min_side = static_cast<int>(g.at("min_side").integer());
    const int max_side = static_cast<int>(g.at("max_side").integer());
    if (count < 0 || width <= 0 || height <= 0 || objects < 0 || min_side <= 0 ||
        max_side < min_side || max_side > std::min(width, height)) {
      g.fail("invalid scene generator parameters");
    }
    const ImageId base = static_cast<ImageId>(cfg.scenes.size());
    for (int i = 0; i < count; ++i) {
      std::uint64_t s = cfg.seed ^ (0x5CE7E5EEDULL + static_cast<std::uint64_t>(i));
      cfg.scenes.push_back(random_scene_spec(splitmix64(s), base + i + 1, width, height, objects,
                                             k, c, min_side, max_side));
    }
  }

  try {
    cfg.validate();
  } catch (const ContractViolation& e) {
    throw DataError(e.what());
  }
  return cfg;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  const json doc = load_toml(path);
  try {
    return sim_config_from_toml(doc);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace selfsim
