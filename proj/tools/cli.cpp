#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "selfsim/contour_cache.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/evaluator.hpp"
#include "selfsim/formats.hpp"
#include "selfsim/fractal.hpp"
#include "selfsim/gate.hpp"
#include "selfsim/pgm.hpp"
#include "selfsim/training_sim.hpp"

namespace selfsim::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void commit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("failed writing " + path.string());
}

Binarization binarization_flag(const std::string& text) {
  try {
    return Binarization::parse(text);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

template <typename T, typename F>
T enum_flag(const std::string& text, F parse) {
  try {
    return parse(text);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

BBox full_image(const GrayImage& img) {
  return BBox::from_corner(0, 0, img.width(), img.height());
}

// ---- hd ----------------------------------------------------------------

struct HdArgs {
  std::string a, b, binarize = "otsu";
  bool raw = false;
};

int cmd_hd(const HdArgs& args, std::ostream& out) {
  const Binarization method = binarization_flag(args.binarize);
  const GrayImage a = load_pgm(args.a);
  const GrayImage b = load_pgm(args.b);
  const PixelExtraction ea = extract_pixel_contour(a, full_image(a), method);
  const PixelExtraction eb = extract_pixel_contour(b, full_image(b), method);
  HDResult r = HDResult::absent();
  if (ea.contour && eb.contour) {
    r = args.raw ? hausdorff(*ea.contour, *eb.contour) : normalized_hausdorff(ea, eb);
  }
  out << "forward " << fmt_double(r.forward) << '\n'
      << "backward " << fmt_double(r.backward) << '\n'
      << "symmetric " << fmt_double(r.symmetric) << '\n';
  return kExitOk;
}

// ---- contour -----------------------------------------------------------

struct ContourArgs {
  std::string image, out, binarize = "otsu";
};

int cmd_contour(const ContourArgs& args, std::ostream& out) {
  const Binarization method = binarization_flag(args.binarize);
  const GrayImage img = load_pgm(args.image);
  const PixelExtraction e = extract_pixel_contour(img, full_image(img), method);
  std::optional<Contour> normalized;
  if (e.contour) normalized = normalize_contour(*e.contour);
  const auto doc = contour_to_json(normalized, e.foreground_area, e.crop_w, e.crop_h);
  commit(args.out, doc.dump(2) + "\n");
  out << "points " << (normalized ? normalized->size() : 0) << '\n';
  return kExitOk;
}

// ---- gate --------------------------------------------------------------

struct GateArgs {
  std::string pairs, out, semantics = "prose", binarize = "otsu", normalization = "own-crop";
  double th_hd = 0.5;
  double iou_gate = 0.5;
};

int cmd_gate(const GateArgs& args, std::ostream& out) {
  GateConfig cfg;
  cfg.th_hd = args.th_hd;
  cfg.iou_gate = args.iou_gate;
  cfg.semantics = enum_flag<GateSemantics>(args.semantics, parse_semantics);
  cfg.binarization = binarization_flag(args.binarize);
  cfg.normalization = enum_flag<Normalization>(args.normalization, parse_normalization);
  try {
    cfg.validate();
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }

  const auto pairs = load_pairs(args.pairs);
  const fs::path base = fs::path(args.pairs).parent_path();
  std::map<std::string, GrayImage> images;

  std::ostringstream csv;
  csv << "index,class_id,iou,hd,indicator,is_fractal,ciou_loss,gated_ciou_loss,smooth_l1_loss,"
         "gated_smooth_l1_loss\n";
  std::size_t gated = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const PairSpec& p = pairs[i];
    auto it = images.find(p.image);
    if (it == images.end()) it = images.emplace(p.image, load_pgm(base / p.image)).first;
    PairEvaluation e;
    try {
      e = evaluate_pair(it->second, p.pred, p.gt, p.reference.value_or(p.pred), cfg);
    } catch (const DataError& err) {
      throw DataError("pair " + std::to_string(i) + ": " + err.what());
    }
    if (e.decision.is_fractal) ++gated;
    csv << i << ',' << p.class_id << ',' << fmt_double(e.decision.iou) << ','
        << fmt_double(e.decision.hd) << ',' << e.decision.indicator << ','
        << (e.decision.is_fractal ? 1 : 0) << ',' << fmt_double(e.ciou_loss) << ','
        << fmt_double(e.gated_ciou_loss) << ',' << fmt_double(e.smooth_l1_loss) << ','
        << fmt_double(e.gated_smooth_l1_loss) << '\n';
  }
  commit(args.out, csv.str());
  out << "pairs " << pairs.size() << " fractal " << gated << '\n';
  return kExitOk;
}

// ---- eval --------------------------------------------------------------

struct EvalArgs {
  std::string gt, det, mode = "ap50", images, contour_cache, out, binarize = "otsu",
                       normalization = "own-crop";
  double th_hd = 0.5;
  double iou = 0.5;
  unsigned threads = 0;
};

int cmd_eval(const EvalArgs& args, std::ostream& out) {
  EvalConfig cfg;
  cfg.mode = enum_flag<EvalMode>(args.mode, parse_eval_mode);
  cfg.th_hd = args.th_hd;
  cfg.iou_thresh = args.iou;
  cfg.threads = args.threads;
  cfg.normalization = enum_flag<Normalization>(args.normalization, parse_normalization);
  const Binarization method = binarization_flag(args.binarize);
  if (!(cfg.th_hd >= 0.0) || !(cfg.iou_thresh > 0.0 && cfg.iou_thresh <= 1.0)) {
    throw UsageError("--th-hd must be >= 0 and --iou must lie in (0, 1]");
  }

  const Dataset dataset = load_annotations(args.gt);
  const std::vector<Detection> dets = load_detections(args.det);

  std::unique_ptr<ContourCache> cache;
  std::unique_ptr<CachingContourSource> source;
  if (cfg.mode == EvalMode::APss) {
    if (args.images.empty() && args.contour_cache.empty()) {
      throw DataError("images required for AP-ss");
    }
    if (!args.contour_cache.empty()) {
      cache = std::make_unique<ContourCache>(fs::exists(args.contour_cache)
                                                 ? ContourCache::load(args.contour_cache)
                                                 : ContourCache{});
    }
    ImageLoader loader;
    if (!args.images.empty()) {
      const fs::path dir = args.images;
      loader = [&dataset, dir](ImageId id) {
        const ImageInfo* info = dataset.find_image(id);
        if (info == nullptr) throw DataError("unknown image id " + std::to_string(id));
        GrayImage img = load_pgm(dir / info->file);
        if (img.width() != info->width || img.height() != info->height) {
          throw DataError(info->file + ": size " + std::to_string(img.width()) + "x" +
                          std::to_string(img.height()) + " does not match the annotation");
        }
        return img;
      };
    }
    source = std::make_unique<CachingContourSource>(loader, cache.get(), method);
  }

  const EvalReport report = evaluate(dataset, dets, cfg, source.get());
  const std::string json_text = report_to_json(report).dump(2) + "\n";
  if (!args.out.empty()) commit(args.out, json_text);
  if (cache && !args.images.empty()) cache->save(args.contour_cache);
  out << report_to_text(report);
  return kExitOk;
}

// ---- gen ---------------------------------------------------------------

struct GenArgs {
  std::string kind, out, out_dir;
  int depth = 5, size = 512, octaves = 4;
  std::uint64_t seed = 1;
  int count = 10, width = 512, height = 512, objects = 3, min_side = 96, max_side = 192;
  bool detections = false;
  double fractal_prob = 0.5, jitter = 0.1, miss_prob = 0.1, fp_rate = 0.2;
};

std::vector<Category> default_categories() {
  return {{1, "fire", true}, {2, "smoke", true}, {3, "other", false}};
}

int cmd_gen(const GenArgs& args, std::ostream& out) {
  if (args.kind == "sierpinski" || args.kind == "plume" || args.kind == "disk") {
    if (args.out.empty()) throw UsageError("--out is required for --kind " + args.kind);
    if (args.size <= 0) throw UsageError("--size must be positive");
    GrayImage img;
    try {
      if (args.kind == "sierpinski") {
        img = mask_to_image(gen_sierpinski(args.depth, args.size));
      } else if (args.kind == "plume") {
        img = gen_plume(args.seed, args.size, args.octaves);
      } else {
        img = mask_to_image(gen_disk(args.size, args.size));
      }
    } catch (const ContractViolation& e) {
      throw UsageError(e.what());
    }
    write_pgm(img, args.out);
    out << "wrote " << args.out << '\n';
    return kExitOk;
  }
  if (args.kind != "scene") throw UsageError("unknown --kind '" + args.kind + "'");
  if (args.out_dir.empty()) throw UsageError("--out-dir is required for --kind scene");
  if (args.count < 0 || args.objects < 0 || args.min_side <= 0 || args.max_side < args.min_side ||
      args.max_side > std::min(args.width, args.height)) {
    throw UsageError("invalid scene parameters");
  }

  SimConfig sim;
  sim.seed = args.seed;
  sim.epochs = 1;
  sim.categories = default_categories();
  sim.schedule = {args.jitter, args.jitter, args.fractal_prob, args.miss_prob, args.fp_rate};
  try {
    sim.validate();
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }

  const std::vector<ObjectKind> kinds = {ObjectKind::Sierpinski, ObjectKind::Plume, ObjectKind::Solid};
  const std::vector<ClassId> classes = {1, 2, 3};
  Dataset ds;
  ds.categories = sim.categories;
  std::vector<Detection> dets;
  std::vector<std::pair<std::string, GrayImage>> images;
  for (int i = 0; i < args.count; ++i) {
    std::uint64_t s = args.seed ^ (0x5CE7E5EEDULL + static_cast<std::uint64_t>(i));
    const SceneSpec spec = random_scene_spec(splitmix64(s), i + 1, args.width, args.height,
                                             args.objects, kinds, classes, args.min_side,
                                             args.max_side);
    SyntheticScene scene = compose_scene(spec);
    char name[32];
    std::snprintf(name, sizeof name, "scene_%04d.pgm", i + 1);
    ds.images.push_back({spec.image_id, name, spec.width, spec.height});
    ds.ground_truth.insert(ds.ground_truth.end(), scene.gts.begin(), scene.gts.end());
    if (args.detections) {
      Rng rng(stub_seed(args.seed, 0, static_cast<std::size_t>(i)));
      auto d = stub_detect(scene, 0, sim, rng);
      dets.insert(dets.end(), d.begin(), d.end());
    }
    images.emplace_back(name, std::move(scene.image));
  }

  const fs::path dir = args.out_dir;
  fs::create_directories(dir);
  for (const auto& [name, img] : images) write_pgm(img, dir / name);
  write_json(annotations_to_json(ds), dir / "annotations.json");
  if (args.detections) write_json(detections_to_json(dets), dir / "detections.json");
  out << "wrote " << images.size() << " scenes to " << dir.string() << '\n';
  return kExitOk;
}

// ---- simulate ----------------------------------------------------------

struct SimArgs {
  std::string config, out;
};

int cmd_simulate(const SimArgs& args, std::ostream& out) {
  const SimConfig cfg = load_sim_config(args.config);
  const auto records = run_simulation(cfg);
  std::ostringstream csv;
  write_epoch_csv(csv, records, cfg.categories);
  commit(args.out, csv.str());
  int first_active = -1;
  for (const EpochRecord& r : records) {
    if (r.gate_active) {
      first_active = r.epoch;
      break;
    }
  }
  out << "epochs " << records.size() << " milestone_epoch " << first_active << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"selfsim: self-similarity metrics for non-rigid object detection"};
  app.require_subcommand(1);

  HdArgs hd;
  auto* hd_cmd = app.add_subcommand("hd", "Hausdorff distance between the largest contours of two images");
  hd_cmd->add_option("--a", hd.a, "First image (PGM/PPM)")->required();
  hd_cmd->add_option("--b", hd.b, "Second image (PGM/PPM)")->required();
  hd_cmd->add_option("--binarize", hd.binarize, "otsu | fixed:<t>");
  hd_cmd->add_flag("--raw", hd.raw, "Pixel-space distance instead of normalized");

  ContourArgs contour;
  auto* contour_cmd = app.add_subcommand("contour", "Extract the normalized outer contour of an image");
  contour_cmd->add_option("--image", contour.image)->required();
  contour_cmd->add_option("--out", contour.out)->required();
  contour_cmd->add_option("--binarize", contour.binarize, "otsu | fixed:<t>");

  GateArgs gate;
  auto* gate_cmd = app.add_subcommand("gate", "Fractal gate and box losses for a pairs file");
  gate_cmd->add_option("--pairs", gate.pairs)->required();
  gate_cmd->add_option("--out", gate.out, "CSV output")->required();
  gate_cmd->add_option("--th-hd", gate.th_hd, "Hausdorff threshold");
  gate_cmd->add_option("--iou-gate", gate.iou_gate, "IoU above which pairs skip the HD test");
  gate_cmd->add_option("--semantics", gate.semantics, "prose | literal");
  gate_cmd->add_option("--binarize", gate.binarize, "otsu | fixed:<t>");
  gate_cmd->add_option("--normalization", gate.normalization, "own-crop | gt-crop");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "AP50 / AP-ss evaluation");
  eval_cmd->add_option("--gt", ev.gt, "Annotation JSON")->required();
  eval_cmd->add_option("--det", ev.det, "Detection JSON")->required();
  eval_cmd->add_option("--mode", ev.mode, "ap50 | apss");
  eval_cmd->add_option("--th-hd", ev.th_hd);
  eval_cmd->add_option("--iou", ev.iou);
  eval_cmd->add_option("--images", ev.images, "Directory holding the annotated images");
  eval_cmd->add_option("--contour-cache", ev.contour_cache, "Persistent contour cache file");
  eval_cmd->add_option("--binarize", ev.binarize, "otsu | fixed:<t>");
  eval_cmd->add_option("--normalization", ev.normalization, "own-crop | gt-crop");
  eval_cmd->add_option("--threads", ev.threads, "0 = hardware concurrency");
  eval_cmd->add_option("--out", ev.out, "JSON report");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate fractal images or synthetic scenes");
  gen_cmd->add_option("--kind", gen.kind, "sierpinski | plume | disk | scene")->required();
  gen_cmd->add_option("--out", gen.out, "Output PGM (single-image kinds)");
  gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory (scene)");
  gen_cmd->add_option("--depth", gen.depth);
  gen_cmd->add_option("--size", gen.size);
  gen_cmd->add_option("--octaves", gen.octaves);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--count", gen.count);
  gen_cmd->add_option("--width", gen.width);
  gen_cmd->add_option("--height", gen.height);
  gen_cmd->add_option("--objects", gen.objects);
  gen_cmd->add_option("--min-side", gen.min_side);
  gen_cmd->add_option("--max-side", gen.max_side);
  gen_cmd->add_flag("--detections", gen.detections, "Also write stub-detector output");
  gen_cmd->add_option("--fractal-prob", gen.fractal_prob);
  gen_cmd->add_option("--jitter", gen.jitter);
  gen_cmd->add_option("--miss-prob", gen.miss_prob);
  gen_cmd->add_option("--fp-rate", gen.fp_rate);

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the training simulator");
  sim_cmd->add_option("--config", sim.config, "TOML config")->required();
  sim_cmd->add_option("--out", sim.out, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*hd_cmd) return cmd_hd(hd, out);
    if (*contour_cmd) return cmd_contour(contour, out);
    if (*gate_cmd) return cmd_gate(gate, out);
    if (*eval_cmd) return cmd_eval(ev, out);
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"selfsim"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace selfsim::cli
