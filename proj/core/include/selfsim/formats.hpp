#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "selfsim/detection.hpp"
#include "selfsim/evaluator.hpp"
#include "selfsim/training_sim.hpp"

namespace selfsim {

// Files carry COCO-style corner boxes [x_min, y_min, w, h]; everything in
// memory is center-based. Conversion happens only here.

/// Schema errors name the JSON path, e.g. "$.annotations[3].bbox[2]".
Dataset parse_annotations(const nlohmann::json& doc);
Dataset load_annotations(const std::filesystem::path& path);
nlohmann::json annotations_to_json(const Dataset& dataset);

std::vector<Detection> parse_detections(const nlohmann::json& doc);
std::vector<Detection> load_detections(const std::filesystem::path& path);
nlohmann::json detections_to_json(const std::vector<Detection>& dets);

struct PairSpec {
  std::string image;                // relative to the pairs file's directory
  BBox pred;
  BBox gt;
  std::optional<BBox> reference;    // defaults to pred
  ClassId class_id = 0;
};

std::vector<PairSpec> parse_pairs(const nlohmann::json& doc);
std::vector<PairSpec> load_pairs(const std::filesystem::path& path);

nlohmann::json contour_to_json(const std::optional<Contour>& contour, std::size_t foreground_area,
                               int crop_w, int crop_h);

nlohmann::json report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);

/// Builds a SimConfig from a parsed TOML tree. Keys:
///   seed, epochs, ap_m, threads
///   [schedule] jitter_start, jitter_end, fractal_prob, miss_prob, fp_rate
///   [gate] th_hd, iou_gate, semantics ("prose"|"literal"), binarize, normalization
///   [[category]] id, name, self_similar, kind (used by scene_gen)
///   [[scene]] seed, image_id, width, height, [[scene.object]] kind, box, class_id, depth, octaves
///   [scene_gen] count, width, height, objects, min_side, max_side
SimConfig sim_config_from_toml(const nlohmann::json& doc);
SimConfig load_sim_config(const std::filesystem::path& path);

/// Writes `doc` with a trailing newline; throws DataError on I/O failure.
void write_json(const nlohmann::json& doc, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

GateSemantics parse_semantics(const std::string& text);
Normalization parse_normalization(const std::string& text);

}  // namespace selfsim
