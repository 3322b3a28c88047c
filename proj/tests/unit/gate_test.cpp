#include <gtest/gtest.h>

#include <cmath>

#include "selfsim/errors.hpp"
#include "selfsim/fractal.hpp"
#include "selfsim/gate.hpp"
#include "selfsim/loss.hpp"

namespace selfsim {
namespace {

struct FractalScene {
  SyntheticScene scene;
  BBox gt;
  BBox part;
};

FractalScene sierpinski_scene() {
  SceneSpec spec{1, 1, 320, 320, {}};
  spec.objects.push_back({ObjectKind::Sierpinski, {32, 32, 288, 288}, 1, 5, 4});
  FractalScene f{compose_scene(spec), {}, {}};
  f.gt = f.scene.gts.at(0).box;
  f.part = f.scene.fractal_regions.at(0).at(0);
  return f;
}

TEST(GateConfig, Validation) {
  GateConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.th_hd = 0.0;
  EXPECT_NO_THROW(cfg.validate());
  cfg.th_hd = -0.1;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = {};
  cfg.iou_gate = 1.0;
  EXPECT_THROW(cfg.validate(), ContractViolation);
}

TEST(Gate, HighIouBypassesContours) {
  const FractalScene f = sierpinski_scene();
  GateStats stats;
  const GateDecision d = gate_decision(f.scene.image, f.gt, f.gt, {}, &stats);
  EXPECT_FALSE(d.hd_tested);
  EXPECT_FALSE(d.is_fractal);
  EXPECT_EQ(d.indicator, 1);
  EXPECT_EQ(stats.extractions, 0u);
}

TEST(Gate, SubTriangleIsFractal) {
  const FractalScene f = sierpinski_scene();
  GateStats stats;
  const GateDecision d = gate_decision(f.scene.image, f.part, f.gt, {}, &stats);
  EXPECT_LT(d.iou, 0.5);
  EXPECT_TRUE(d.hd_tested);
  EXPECT_LT(d.hd, 0.1);
  EXPECT_TRUE(d.is_fractal);
  EXPECT_EQ(d.indicator, 0);
  EXPECT_EQ(stats.extractions, 2u);
}

TEST(Gate, BackgroundPredictionIsNotFractal) {
  const FractalScene f = sierpinski_scene();
  const BBox empty = BBox::from_corner(0, 0, 24, 24);
  const GateDecision d = gate_decision(f.scene.image, empty, f.gt, {});
  EXPECT_TRUE(std::isinf(d.hd));
  EXPECT_FALSE(d.is_fractal);
  EXPECT_EQ(d.indicator, 1);
}

TEST(Gate, ZeroThresholdRejectsPositiveHd) {
  const FractalScene f = sierpinski_scene();
  GateConfig cfg;
  cfg.th_hd = 0.0;
  const GateDecision d = gate_decision(f.scene.image, f.part, f.gt, cfg);
  EXPECT_GT(d.hd, 0.0);
  EXPECT_FALSE(d.is_fractal);
}

TEST(GatedLoss, ProseZeroesFractalPairs) {
  const FractalScene f = sierpinski_scene();
  EXPECT_GT(ciou_loss(f.part, f.gt), 0.0);
  EXPECT_EQ(gated_ciou_loss(f.scene.image, f.part, f.gt, {}), 0.0);
  EXPECT_EQ(gated_smooth_l1_loss(f.scene.image, f.part, f.gt, f.part, {}), 0.0);
}

TEST(GatedLoss, NonFractalLowIouEqualsUngated) {
  const FractalScene f = sierpinski_scene();
  const BBox off = BBox::from_corner(f.gt.left() + 100, f.gt.top() - 30, 200, 60);
  const GateDecision d = gate_decision(f.scene.image, off, f.gt, {});
  ASSERT_LT(d.iou, 0.5);
  ASSERT_FALSE(d.is_fractal);
  EXPECT_EQ(gated_ciou_loss(f.scene.image, off, f.gt, {}), ciou_loss(off, f.gt));
  EXPECT_EQ(gated_smooth_l1_loss(f.scene.image, off, f.gt, off, {}),
            smooth_l1_box_loss(off, f.gt, off));
}

TEST(GatedLoss, LiteralSemanticsKeepsFractalLoss) {
  const FractalScene f = sierpinski_scene();
  GateConfig cfg;
  cfg.semantics = GateSemantics::LiteralEquation;
  const GateDecision d = gate_decision(f.scene.image, f.part, f.gt, cfg);
  EXPECT_TRUE(d.is_fractal);
  EXPECT_EQ(d.indicator, 1);
  EXPECT_EQ(gated_ciou_loss(f.scene.image, f.part, f.gt, cfg), ciou_loss(f.part, f.gt));
}

TEST(GatedLoss, IdenticalBoxesHaveZeroLoss) {
  const FractalScene f = sierpinski_scene();
  EXPECT_EQ(gated_smooth_l1_loss(f.scene.image, f.gt, f.gt, f.gt, {}), 0.0);
  const PairEvaluation e = evaluate_pair(f.scene.image, f.gt, f.gt, f.gt, {});
  EXPECT_EQ(e.ciou_loss, 0.0);
  EXPECT_EQ(e.gated_ciou_loss, 0.0);
}

TEST(GatedLoss, PrecomputedOverloadAgrees) {
  const FractalScene f = sierpinski_scene();
  const PixelExtraction pe = extract_pixel_contour(f.scene.image, f.part);
  const PixelExtraction ge = extract_pixel_contour(f.scene.image, f.gt);
  const GateDecision a = gate_decision(iou(f.part, f.gt), pe, ge, {});
  const GateDecision b = gate_decision(f.scene.image, f.part, f.gt, {});
  EXPECT_EQ(a.hd, b.hd);
  EXPECT_EQ(a.is_fractal, b.is_fractal);
}

}  // namespace
}  // namespace selfsim
