#include "selfsim/training_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "selfsim/errors.hpp"
#include "selfsim/evaluator.hpp"

namespace selfsim {

MilestoneState milestone_update(MilestoneState state, const std::map<ClassId, double>& per_class_ap) {
  if (state.self_similar.empty()) {
    throw ContractViolation("milestone: no class is marked self-similar");
  }
  double lowest = 1.0;
  for (ClassId c : state.self_similar) {
    auto it = per_class_ap.find(c);
    if (it == per_class_ap.end()) {
      throw ContractViolation("milestone: no AP for self-similar class " + std::to_string(c));
    }
    lowest = std::min(lowest, it->second);
  }
  state.per_class_ap = per_class_ap;
  if (lowest >= state.ap_m) state.active = true;
  return state;
}

double NoiseSchedule::jitter_at(int epoch, int epochs) const noexcept {
  if (epochs <= 1) return jitter_start;
  const double t = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
  return jitter_start + (jitter_end - jitter_start) * t;
}

void SimConfig::validate() const {
  if (epochs < 1) throw ContractViolation("simulation: epochs must be >= 1");
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ContractViolation(std::string("simulation: ") + name + " must lie in [0, 1]");
    }
  };
  prob(schedule.fractal_prob, "fractal_prob");
  prob(schedule.miss_prob, "miss_prob");
  prob(schedule.fp_rate, "fp_rate");
  if (!(schedule.jitter_start >= 0.0) || !(schedule.jitter_end >= 0.0)) {
    throw ContractViolation("simulation: jitter must be non-negative");
  }
  gate.validate();
  std::set<ImageId> ids;
  std::set<ClassId> classes;
  for (const Category& c : categories) classes.insert(c.id);
  for (const SceneSpec& s : scenes) {
    if (!ids.insert(s.image_id).second) {
      throw ContractViolation("simulation: duplicate scene image id " + std::to_string(s.image_id));
    }
    for (const ObjectSpec& o : s.objects) {
      if (!classes.contains(o.class_id)) {
        throw ContractViolation("simulation: object class " + std::to_string(o.class_id) +
                                " is not a declared category");
      }
    }
  }
}

std::uint64_t stub_seed(std::uint64_t seed, int epoch, std::size_t scene_index) noexcept {
  std::uint64_t s = seed;
  std::uint64_t v = splitmix64(s);
  v = hash64(v ^ static_cast<std::uint64_t>(epoch));
  return hash64(v ^ (static_cast<std::uint64_t>(scene_index) << 20));
}

namespace {

BBox clamp_to_scene(BBox b, int width, int height) {
  const double x0 = std::clamp(b.left(), 0.0, static_cast<double>(width) - 1.0);
  const double y0 = std::clamp(b.top(), 0.0, static_cast<double>(height) - 1.0);
  const double x1 = std::clamp(b.right(), x0 + 1.0, static_cast<double>(width));
  const double y1 = std::clamp(b.bottom(), y0 + 1.0, static_cast<double>(height));
  return BBox::from_corner(x0, y0, x1 - x0, y1 - y0);
}

BBox jitter(const BBox& b, double amount, Rng& rng) {
  if (amount == 0.0) return b;
  return {b.x + rng.uniform(-amount, amount) * b.w, b.y + rng.uniform(-amount, amount) * b.h,
          b.w * std::exp(rng.uniform(-amount, amount)),
          b.h * std::exp(rng.uniform(-amount, amount))};
}

}  // namespace

std::vector<Detection> stub_detect(const SyntheticScene& scene, int epoch, const SimConfig& cfg,
                                   Rng& rng) {
  const NoiseSchedule& s = cfg.schedule;
  const double j = s.jitter_at(epoch, cfg.epochs);
  const int w = scene.image.width();
  const int h = scene.image.height();
  std::vector<Detection> out;
  for (std::size_t i = 0; i < scene.gts.size(); ++i) {
    const GroundTruth& gt = scene.gts[i];
    const auto& regions = scene.fractal_regions[i];
    // Draw every variate unconditionally so one knob does not reshuffle the
    // random stream seen by the others.
    const double u_frac = rng.uniform();
    const double u_miss = rng.uniform();
    const double u_fp = rng.uniform();
    const std::uint64_t pick = rng.below(std::max<std::size_t>(regions.size(), 1));
    const double score = rng.uniform();

    if (u_frac < s.fractal_prob && !regions.empty()) {
      const BBox box = clamp_to_scene(jitter(regions[pick], 0.25 * j, rng), w, h);
      out.push_back({gt.image_id, gt.class_id, box, 0.3 + 0.6 * score});
    } else if (u_miss >= s.miss_prob) {
      const BBox box = clamp_to_scene(jitter(gt.box, j, rng), w, h);
      out.push_back({gt.image_id, gt.class_id, box, 0.5 + 0.5 * score});
    }

    if (u_fp < s.fp_rate && !cfg.categories.empty()) {
      const double side = std::max(8.0, 0.5 * std::min(gt.box.w, gt.box.h));
      const double x0 = rng.uniform(0.0, std::max(1.0, w - side));
      const double y0 = rng.uniform(0.0, std::max(1.0, h - side));
      const Category& cat = cfg.categories[rng.below(cfg.categories.size())];
      out.push_back({gt.image_id, cat.id, clamp_to_scene(BBox::from_corner(x0, y0, side, side), w, h),
                     0.6 * rng.uniform()});
    }
  }
  return out;
}

namespace {

std::map<ClassId, double> per_class(const EvalReport& r) {
  std::map<ClassId, double> out;
  for (const ClassReport& c : r.classes) out[c.id] = c.ap;
  return out;
}

}  // namespace

std::vector<EpochRecord> run_simulation(const SimConfig& cfg) {
  cfg.validate();

  std::vector<SyntheticScene> scenes;
  Dataset dataset;
  dataset.categories = cfg.categories;
  for (const SceneSpec& spec : cfg.scenes) {
    scenes.push_back(compose_scene(spec));
    dataset.images.push_back({spec.image_id, "", spec.width, spec.height});
    for (const GroundTruth& g : scenes.back().gts) dataset.ground_truth.push_back(g);
  }
  const auto image_of = [&](ImageId id) -> const GrayImage& {
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      if (cfg.scenes[i].image_id == id) return scenes[i].image;
    }
    throw DataError("simulation: unknown scene " + std::to_string(id));
  };

  MilestoneState milestone;
  milestone.ap_m = cfg.ap_m;
  for (const Category& c : cfg.categories) {
    if (c.self_similar) milestone.self_similar.push_back(c.id);
  }

  EvalConfig ap50_cfg;
  ap50_cfg.mode = EvalMode::AP50;
  ap50_cfg.iou_thresh = cfg.gate.iou_gate;
  ap50_cfg.threads = cfg.threads;
  EvalConfig apss_cfg = ap50_cfg;
  apss_cfg.mode = EvalMode::APss;
  apss_cfg.th_hd = cfg.gate.th_hd;
  apss_cfg.normalization = cfg.gate.normalization;

  ContourCache cache;
  CachingContourSource contours([&](ImageId id) { return image_of(id); }, &cache,
                                cfg.gate.binarization);

  std::vector<EpochRecord> records;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<Detection> dets;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      Rng rng(stub_seed(cfg.seed, epoch, i));
      auto scene_dets = stub_detect(scenes[i], epoch, cfg, rng);
      dets.insert(dets.end(), scene_dets.begin(), scene_dets.end());
    }

    const EvalReport r50 = evaluate(dataset, dets, ap50_cfg);
    const EvalReport rss = evaluate(dataset, dets, apss_cfg, &contours);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.ap50_all = r50.map;
    rec.ap50 = per_class(r50);
    rec.apss_all = rss.map;
    rec.apss = per_class(rss);
    if (!milestone.self_similar.empty()) milestone = milestone_update(milestone, rec.ap50);
    rec.gate_active = milestone.active;

    if (rec.gate_active) {
      double gated = 0.0;
      double ungated = 0.0;
      for (const Detection& d : dets) {
        const GroundTruth* best = nullptr;
        double best_iou = -1.0;
        for (const GroundTruth& g : dataset.ground_truth) {
          if (g.image_id != d.image_id || g.class_id != d.class_id) continue;
          const double v = iou(d.box, g.box);
          if (v > best_iou) {
            best_iou = v;
            best = &g;
          }
        }
        if (best == nullptr || best_iou >= cfg.gate.iou_gate) continue;
        const PairEvaluation e = evaluate_pair(image_of(d.image_id), d.box, best->box, d.box, cfg.gate);
        ++rec.pairs_tested;
        if (e.decision.is_fractal) ++rec.pairs_gated;
        gated += e.gated_ciou_loss;
        ungated += e.ciou_loss;
      }
      if (rec.pairs_tested > 0) {
        rec.mean_gated_loss = gated / static_cast<double>(rec.pairs_tested);
        rec.mean_ungated_loss = ungated / static_cast<double>(rec.pairs_tested);
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_epoch_csv(std::ostream& out, const std::vector<EpochRecord>& records,
                     const std::vector<Category>& categories) {
  out << "epoch,ap50_all";
  for (const Category& c : categories) out << ",ap50_" << c.name;
  out << ",apss_all";
  for (const Category& c : categories) out << ",apss_" << c.name;
  out << ",gate_active,pairs_tested,pairs_gated,mean_gated_loss,mean_ungated_loss\n";

  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  auto lookup = [](const std::map<ClassId, double>& m, ClassId id) {
    auto it = m.find(id);
    return it == m.end() ? 0.0 : it->second;
  };
  for (const EpochRecord& r : records) {
    out << r.epoch << ',' << num(r.ap50_all);
    for (const Category& c : categories) out << ',' << num(lookup(r.ap50, c.id));
    out << ',' << num(r.apss_all);
    for (const Category& c : categories) out << ',' << num(lookup(r.apss, c.id));
    out << ',' << (r.gate_active ? 1 : 0) << ',' << r.pairs_tested << ',' << r.pairs_gated << ','
        << num(r.mean_gated_loss) << ',' << num(r.mean_ungated_loss) << '\n';
  }
}

}  // namespace selfsim
