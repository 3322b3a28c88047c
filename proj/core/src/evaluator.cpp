#include "selfsim/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

#include "selfsim/errors.hpp"

namespace selfsim {

const ImageInfo* Dataset::find_image(ImageId id) const noexcept {
  for (const ImageInfo& img : images) {
    if (img.id == id) return &img;
  }
  return nullptr;
}

const Category* Dataset::find_category(ClassId id) const noexcept {
  for (const Category& c : categories) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::string to_string(EvalMode mode) { return mode == EvalMode::AP50 ? "ap50" : "apss"; }

EvalMode parse_eval_mode(const std::string& text) {
  if (text == "ap50") return EvalMode::AP50;
  if (text == "apss") return EvalMode::APss;
  throw DataError("unknown evaluation mode '" + text + "' (expected ap50 or apss)");
}

std::vector<PrPoint> pr_curve(const std::vector<bool>& labels, std::size_t n_gt) {
  std::vector<PrPoint> curve;
  curve.reserve(labels.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) ++tp;
    const double recall = n_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gt);
    curve.push_back({recall, static_cast<double>(tp) / static_cast<double>(i + 1)});
  }
  return curve;
}

double average_precision(std::span<const PrPoint> curve) {
  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    ap += (curve[i].recall - prev_recall) * envelope[i];
    prev_recall = curve[i].recall;
  }
  return std::clamp(ap, 0.0, 1.0);
}

namespace {

std::vector<std::size_t> score_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });
  return order;
}

struct Candidate {
  long gt = -1;
  bool iou_ok = false;
  double iou = 0.0;
  double hd = kInfiniteDistance;
};

// True when a is preferred over b.
bool better(const Candidate& a, const Candidate& b) {
  if (a.iou_ok != b.iou_ok) return a.iou_ok;
  if (a.iou != b.iou) return a.iou > b.iou;
  if (!a.iou_ok && a.hd != b.hd) return a.hd < b.hd;
  return a.gt < b.gt;
}

// Matches the detections of one image. det_idx and gt_idx index into the
// full spans; results are written into `out` at those positions.
void match_image(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                 const std::vector<std::size_t>& det_idx, const std::vector<std::size_t>& gt_idx,
                 const EvalConfig& cfg, ContourSource* contours, MatchResult& out) {
  std::map<std::size_t, PixelExtraction> gt_crops;
  auto gt_crop = [&](std::size_t g) -> const PixelExtraction& {
    auto it = gt_crops.find(g);
    if (it == gt_crops.end()) {
      it = gt_crops.emplace(g, contours->extract(gts[g].image_id, gts[g].box)).first;
    }
    return it->second;
  };

  for (std::size_t d : det_idx) {
    const Detection& det = dets[d];
    Candidate best;
    std::vector<Candidate> hd_pending;
    for (std::size_t g : gt_idx) {
      if (out.gt_matched[g] || gts[g].class_id != det.class_id) continue;
      Candidate c;
      c.gt = static_cast<long>(g);
      c.iou = iou(det.box, gts[g].box);
      c.iou_ok = c.iou >= cfg.iou_thresh;
      if (c.iou_ok) {
        if (best.gt < 0 || better(c, best)) best = c;
      } else if (cfg.mode == EvalMode::APss) {
        hd_pending.push_back(c);
      }
    }
    // HD is only consulted when no IoU-qualified GT is available.
    if (best.gt < 0 && !hd_pending.empty()) {
      const PixelExtraction det_crop = contours->extract(det.image_id, det.box);
      if (det_crop.contour) {
        for (Candidate& c : hd_pending) {
          c.hd = normalized_hausdorff(det_crop, gt_crop(static_cast<std::size_t>(c.gt)),
                                      cfg.normalization)
                     .symmetric;
          if (c.hd <= cfg.th_hd && (best.gt < 0 || better(c, best))) best = c;
        }
      }
    }
    if (best.gt >= 0) {
      out.is_tp[d] = true;
      out.matched_gt[d] = best.gt;
      out.via_hd[d] = !best.iou_ok;
      out.gt_matched[static_cast<std::size_t>(best.gt)] = true;
    }
  }
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

MatchResult match_detections(std::span<const Detection> dets,
                             std::span<const GroundTruth> gts, const EvalConfig& cfg,
                             ContourSource* contours) {
  if (cfg.mode == EvalMode::APss && contours == nullptr) {
    throw DataError("images required for AP-ss");
  }
  MatchResult out;
  out.is_tp.assign(dets.size(), false);
  out.matched_gt.assign(dets.size(), -1);
  out.via_hd.assign(dets.size(), false);
  out.gt_matched.assign(gts.size(), false);

  // Matching never crosses images, so images are independent jobs.
  std::map<ImageId, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> per_image;
  for (std::size_t d : score_order(dets)) per_image[dets[d].image_id].first.push_back(d);
  for (std::size_t g = 0; g < gts.size(); ++g) per_image[gts[g].image_id].second.push_back(g);

  std::vector<const std::pair<std::vector<std::size_t>, std::vector<std::size_t>>*> jobs;
  for (const auto& [id, job] : per_image) {
    if (!job.first.empty() && !job.second.empty()) jobs.push_back(&job);
  }

  // Each job writes disjoint det/gt slots; std::vector<bool> packs bits, so
  // workers fill private results that are merged afterwards.
  std::vector<MatchResult> partial(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      MatchResult& r = partial[j];
      r.is_tp.assign(dets.size(), false);
      r.matched_gt.assign(dets.size(), -1);
      r.via_hd.assign(dets.size(), false);
      r.gt_matched.assign(gts.size(), false);
      try {
        match_image(dets, gts, jobs[j]->first, jobs[j]->second, cfg, contours, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n = worker_count(cfg.threads, jobs.size());
  if (n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    for (std::size_t d : jobs[j]->first) {
      out.is_tp[d] = partial[j].is_tp[d];
      out.matched_gt[d] = partial[j].matched_gt[d];
      out.via_hd[d] = partial[j].via_hd[d];
    }
    for (std::size_t g : jobs[j]->second) out.gt_matched[g] = partial[j].gt_matched[g];
  }
  return out;
}

const ClassReport* EvalReport::find(ClassId id) const noexcept {
  for (const ClassReport& c : classes) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

void validate_references(const Dataset& dataset, std::span<const Detection> dets) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < dataset.ground_truth.size(); ++i) {
    const GroundTruth& g = dataset.ground_truth[i];
    if (dataset.find_image(g.image_id) == nullptr) {
      problems.push_back("annotation " + std::to_string(i) + ": unknown image_id " +
                         std::to_string(g.image_id));
    }
    if (dataset.find_category(g.class_id) == nullptr) {
      problems.push_back("annotation " + std::to_string(i) + ": unknown category_id " +
                         std::to_string(g.class_id));
    }
  }
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dataset.find_image(dets[i].image_id) == nullptr) {
      problems.push_back("detection " + std::to_string(i) + ": unknown image_id " +
                         std::to_string(dets[i].image_id));
    }
    if (dataset.find_category(dets[i].class_id) == nullptr) {
      problems.push_back("detection " + std::to_string(i) + ": unknown category_id " +
                         std::to_string(dets[i].class_id));
    }
  }
  if (problems.empty()) return;
  std::string msg = "unresolved ids:";
  constexpr std::size_t kShown = 20;
  for (std::size_t i = 0; i < problems.size() && i < kShown; ++i) msg += "\n  " + problems[i];
  if (problems.size() > kShown) {
    msg += "\n  ... and " + std::to_string(problems.size() - kShown) + " more";
  }
  throw DataError(msg);
}

EvalReport evaluate(const Dataset& dataset, std::span<const Detection> dets,
                    const EvalConfig& cfg, ContourSource* contours) {
  validate_references(dataset, dets);
  const MatchResult match = match_detections(dets, dataset.ground_truth, cfg, contours);
  const std::vector<std::size_t> order = score_order(dets);

  EvalReport report;
  report.mode = cfg.mode;
  double ap_sum = 0.0;
  std::size_t ap_classes = 0;
  std::size_t total_gt = 0;
  for (const Category& cat : dataset.categories) {
    ClassReport cr;
    cr.id = cat.id;
    cr.name = cat.name;
    cr.n_gt = static_cast<std::size_t>(std::count_if(
        dataset.ground_truth.begin(), dataset.ground_truth.end(),
        [&](const GroundTruth& g) { return g.class_id == cat.id; }));
    std::vector<bool> labels;
    for (std::size_t d : order) {
      if (dets[d].class_id != cat.id) continue;
      labels.push_back(match.is_tp[d]);
      (match.is_tp[d] ? cr.tp : cr.fp) += 1;
    }
    cr.curve = pr_curve(labels, cr.n_gt);
    cr.fn = cr.n_gt - cr.tp;
    if (cr.n_gt > 0) {
      cr.ap = average_precision(cr.curve);
      cr.recall = static_cast<double>(cr.tp) / static_cast<double>(cr.n_gt);
      ap_sum += cr.ap;
      ++ap_classes;
    }
    report.tp += cr.tp;
    report.fp += cr.fp;
    report.fn += cr.fn;
    total_gt += cr.n_gt;
    report.classes.push_back(std::move(cr));
  }
  report.map = ap_classes > 0 ? ap_sum / static_cast<double>(ap_classes) : 0.0;
  report.recall = total_gt > 0 ? static_cast<double>(report.tp) / static_cast<double>(total_gt) : 0.0;
  return report;
}

}  // namespace selfsim
