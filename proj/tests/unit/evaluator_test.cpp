#include <gtest/gtest.h>

#include <algorithm>

#include "selfsim/contour_cache.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/evaluator.hpp"
#include "selfsim/fractal.hpp"
#include "selfsim/rng.hpp"

namespace selfsim {
namespace {

// Precision envelope taken by scanning every later point.
double envelope_ap(const std::vector<bool>& labels, std::size_t n_gt) {
  if (n_gt == 0) return 0.0;
  std::vector<double> rec, prec;
  double tp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    tp += labels[i] ? 1 : 0;
    rec.push_back(tp / static_cast<double>(n_gt));
    prec.push_back(tp / static_cast<double>(i + 1));
  }
  double ap = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    double best = 0.0;
    for (std::size_t j = i; j < rec.size(); ++j) best = std::max(best, prec[j]);
    ap += (rec[i] - prev) * best;
    prev = rec[i];
  }
  return ap;
}

double ap_of(const std::vector<bool>& labels, std::size_t n_gt) {
  const auto curve = pr_curve(labels, n_gt);
  return average_precision(curve);
}

struct Fixture {
  SyntheticScene scene;
  Dataset dataset;
};

Fixture single_sierpinski() {
  SceneSpec spec{1, 1, 320, 320, {}};
  spec.objects.push_back({ObjectKind::Sierpinski, {32, 32, 288, 288}, 1, 5, 4});
  Fixture f{compose_scene(spec), {}};
  f.dataset.images.push_back({1, "s.pgm", 320, 320});
  f.dataset.categories.push_back({1, "fire", true});
  f.dataset.ground_truth = f.scene.gts;
  return f;
}

TEST(PrCurve, Examples) {
  EXPECT_EQ(pr_curve({true}, 1), (std::vector<PrPoint>{{1.0, 1.0}}));
  EXPECT_EQ(pr_curve({true, false}, 1), (std::vector<PrPoint>{{1.0, 1.0}, {1.0, 0.5}}));
  EXPECT_TRUE(pr_curve({}, 2).empty());
  EXPECT_EQ(ap_of({}, 2), 0.0);
}

TEST(AveragePrecision, Examples) {
  EXPECT_EQ(ap_of({true}, 1), 1.0);
  EXPECT_NEAR(ap_of({true, false, true}, 2), 0.5 + (2.0 / 3.0) * 0.5, 1e-15);
  EXPECT_EQ(ap_of({false, false}, 3), 0.0);
}

TEST(AveragePrecision, MatchesEnvelopeOracle) {
  Rng rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng.below(40);
    std::vector<bool> labels(n);
    std::size_t tps = 0;
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = rng.bernoulli(0.5);
      tps += labels[i] ? 1 : 0;
    }
    const std::size_t n_gt = tps + rng.below(5) + (tps == 0 ? 1 : 0);
    EXPECT_NEAR(ap_of(labels, n_gt), envelope_ap(labels, n_gt), 1e-12);
  }
}

TEST(Match, ExactDetectionIsTpInBothModes) {
  const Fixture f = single_sierpinski();
  const std::vector<Detection> dets{{1, 1, f.scene.gts[0].box, 0.9}};
  CachingContourSource src([&](ImageId) { return f.scene.image; }, nullptr, {});
  for (EvalMode mode : {EvalMode::AP50, EvalMode::APss}) {
    EvalConfig cfg;
    cfg.mode = mode;
    const MatchResult m = match_detections(dets, f.scene.gts, cfg, &src);
    EXPECT_TRUE(m.is_tp[0]);
    EXPECT_FALSE(m.via_hd[0]);
  }
  EXPECT_EQ(src.extractions(), 0u);
}

TEST(Match, FractalDetectionOnlyCountsUnderApss) {
  const Fixture f = single_sierpinski();
  const std::vector<Detection> dets{{1, 1, f.scene.fractal_regions[0][1], 0.9}};
  CachingContourSource src([&](ImageId) { return f.scene.image; }, nullptr, {});
  EvalConfig cfg;
  EXPECT_FALSE(match_detections(dets, f.scene.gts, cfg, &src).is_tp[0]);
  cfg.mode = EvalMode::APss;
  const MatchResult m = match_detections(dets, f.scene.gts, cfg, &src);
  EXPECT_TRUE(m.is_tp[0]);
  EXPECT_TRUE(m.via_hd[0]);
  EXPECT_EQ(m.matched_gt[0], 0);
}

TEST(Match, HigherScoreWinsSingleGt) {
  const std::vector<GroundTruth> gts{{1, 1, {50, 50, 20, 20}}};
  const std::vector<Detection> dets{{1, 1, {50, 50, 20, 20}, 0.4}, {1, 1, {51, 50, 20, 20}, 0.8}};
  const MatchResult m = match_detections(dets, gts, {});
  EXPECT_FALSE(m.is_tp[0]);
  EXPECT_TRUE(m.is_tp[1]);
  EXPECT_TRUE(m.gt_matched[0]);
}

TEST(Match, ApssWithoutSourceIsDataError) {
  const std::vector<GroundTruth> gts{{1, 1, {50, 50, 20, 20}}};
  const std::vector<Detection> dets{{1, 1, {50, 50, 20, 20}, 0.4}};
  EvalConfig cfg;
  cfg.mode = EvalMode::APss;
  EXPECT_THROW(match_detections(dets, gts, cfg), DataError);
}

TEST(Evaluate, EmptyDetections) {
  const Fixture f = single_sierpinski();
  const EvalReport r = evaluate(f.dataset, {}, {});
  EXPECT_EQ(r.map, 0.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.fn, 1u);
}

TEST(Evaluate, PerfectDetectionsBothModes) {
  Dataset ds;
  ds.categories = {{1, "fire", true}, {2, "smoke", true}, {3, "other", false}};
  std::vector<Detection> dets;
  std::map<ImageId, GrayImage> images;
  for (int i = 1; i <= 4; ++i) {
    const SceneSpec spec = random_scene_spec(100 + i, i, 256, 256, 3,
                                             {ObjectKind::Sierpinski, ObjectKind::Plume,
                                              ObjectKind::Solid},
                                             {1, 2, 3}, 48, 96);
    SyntheticScene s = compose_scene(spec);
    ds.images.push_back({i, "x", 256, 256});
    for (const auto& g : s.gts) {
      ds.ground_truth.push_back(g);
      dets.push_back({g.image_id, g.class_id, g.box, 1.0});
    }
    images[i] = std::move(s.image);
  }
  CachingContourSource src([&](ImageId id) { return images.at(id); }, nullptr, {});
  for (EvalMode mode : {EvalMode::AP50, EvalMode::APss}) {
    EvalConfig cfg;
    cfg.mode = mode;
    const EvalReport r = evaluate(ds, dets, cfg, &src);
    EXPECT_EQ(r.map, 1.0);
    EXPECT_EQ(r.recall, 1.0);
    EXPECT_EQ(r.fp, 0u);
  }
}

TEST(Evaluate, UnknownReferencesRejected) {
  const Fixture f = single_sierpinski();
  const std::vector<Detection> bad_image{{9, 1, {10, 10, 5, 5}, 0.5}};
  EXPECT_THROW(evaluate(f.dataset, bad_image, {}), DataError);
  const std::vector<Detection> bad_class{{1, 7, {10, 10, 5, 5}, 0.5}};
  EXPECT_THROW(evaluate(f.dataset, bad_class, {}), DataError);
}

TEST(Evaluate, ThreadCountDoesNotChangeResult) {
  Dataset ds;
  ds.categories = {{1, "fire", true}, {3, "other", false}};
  std::vector<Detection> dets;
  Rng rng(61);
  for (int i = 1; i <= 30; ++i) {
    ds.images.push_back({i, "x", 200, 200});
    for (int k = 0; k < 3; ++k) {
      const BBox b{rng.uniform(20, 180), rng.uniform(20, 180), rng.uniform(10, 40),
                   rng.uniform(10, 40)};
      const ClassId c = rng.bernoulli(0.5) ? 1 : 3;
      ds.ground_truth.push_back({i, c, b});
      dets.push_back({i, c, {b.x + rng.uniform(-8, 8), b.y, b.w, b.h}, rng.uniform()});
    }
  }
  EvalConfig one;
  one.threads = 1;
  EvalConfig many;
  many.threads = 8;
  const EvalReport a = evaluate(ds, dets, one);
  const EvalReport b = evaluate(ds, dets, many);
  EXPECT_EQ(a.map, b.map);
  EXPECT_EQ(a.tp, b.tp);
  for (std::size_t i = 0; i < a.classes.size(); ++i) EXPECT_EQ(a.classes[i].curve, b.classes[i].curve);
}

TEST(EvalModeText, ParseAndPrint) {
  EXPECT_EQ(parse_eval_mode("apss"), EvalMode::APss);
  EXPECT_EQ(to_string(EvalMode::AP50), "ap50");
  EXPECT_THROW(parse_eval_mode("map"), DataError);
}

}  // namespace
}  // namespace selfsim
