#include <gtest/gtest.h>

#include <sstream>

#include "selfsim/errors.hpp"
#include "selfsim/evaluator.hpp"
#include "selfsim/training_sim.hpp"

namespace selfsim {
namespace {

MilestoneState fire_smoke(double ap_m = 0.25) {
  MilestoneState s;
  s.ap_m = ap_m;
  s.self_similar = {1, 2};
  return s;
}

SimConfig small_config(double fractal_prob, double jitter) {
  SimConfig cfg;
  cfg.seed = 3;
  cfg.epochs = 3;
  cfg.categories = {{1, "fire", true}, {2, "smoke", true}, {3, "other", false}};
  cfg.schedule = {jitter, jitter, fractal_prob, 0.0, 0.0};
  for (int i = 0; i < 4; ++i) {
    cfg.scenes.push_back(random_scene_spec(40 + i, i + 1, 256, 256, 3,
                                           {ObjectKind::Sierpinski, ObjectKind::Plume,
                                            ObjectKind::Solid},
                                           {1, 2, 3}, 64, 112));
  }
  return cfg;
}

TEST(Milestone, BelowThresholdStaysInactive) {
  EXPECT_FALSE(milestone_update(fire_smoke(), {{1, 0.3}, {2, 0.2}}).active);
}

TEST(Milestone, ActivatesWhenEveryClassReaches) {
  EXPECT_TRUE(milestone_update(fire_smoke(), {{1, 0.3}, {2, 0.26}}).active);
  EXPECT_TRUE(milestone_update(fire_smoke(), {{1, 0.25}, {2, 0.25}}).active);
}

TEST(Milestone, Latches) {
  const MilestoneState on = milestone_update(fire_smoke(), {{1, 0.3}, {2, 0.3}});
  EXPECT_TRUE(milestone_update(on, {{1, 0.1}, {2, 0.1}}).active);
}

TEST(Milestone, MissingClassIsContractViolation) {
  EXPECT_THROW(milestone_update(fire_smoke(), {{1, 0.3}}), ContractViolation);
}

TEST(NoiseSchedule, LinearDecay) {
  const NoiseSchedule s{0.5, 0.1, 0, 0, 0};
  EXPECT_DOUBLE_EQ(s.jitter_at(0, 5), 0.5);
  EXPECT_DOUBLE_EQ(s.jitter_at(4, 5), 0.1);
  EXPECT_DOUBLE_EQ(s.jitter_at(2, 5), 0.3);
  EXPECT_DOUBLE_EQ(s.jitter_at(0, 1), 0.5);
}

TEST(StubDetect, DegenerateScheduleGivesExactBoxes) {
  const SimConfig cfg = small_config(0.0, 0.0);
  const SyntheticScene scene = compose_scene(cfg.scenes[0]);
  Rng rng(stub_seed(cfg.seed, 0, 0));
  const auto dets = stub_detect(scene, 0, cfg, rng);
  ASSERT_EQ(dets.size(), scene.gts.size());
  for (std::size_t i = 0; i < dets.size(); ++i) EXPECT_EQ(dets[i].box, scene.gts[i].box);
}

TEST(StubDetect, Deterministic) {
  const SimConfig cfg = small_config(0.5, 0.3);
  const SyntheticScene scene = compose_scene(cfg.scenes[1]);
  Rng a(stub_seed(cfg.seed, 2, 1)), b(stub_seed(cfg.seed, 2, 1));
  EXPECT_EQ(stub_detect(scene, 2, cfg, a), stub_detect(scene, 2, cfg, b));
}

TEST(Simulation, PerfectDetector) {
  SimConfig cfg = small_config(0.0, 0.0);
  cfg.epochs = 1;
  const auto records = run_simulation(cfg);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].ap50_all, 1.0);
  EXPECT_EQ(records[0].apss_all, 1.0);
}

TEST(Simulation, AllFractalOutputsFavourApss) {
  const SimConfig cfg = small_config(1.0, 0.0);
  for (const EpochRecord& r : run_simulation(cfg)) {
    EXPECT_LT(r.ap50.at(1), 0.2);
    EXPECT_GT(r.apss.at(1), 0.8);
    EXPECT_GE(r.apss_all, r.ap50_all);
  }
}

TEST(Simulation, GateStatsOnlyWhenActive) {
  SimConfig cfg = small_config(0.6, 0.1);
  cfg.ap_m = 0.0;
  cfg.epochs = 2;
  const auto records = run_simulation(cfg);
  for (const EpochRecord& r : records) {
    EXPECT_TRUE(r.gate_active);
    EXPECT_GT(r.pairs_tested, 0u);
    EXPECT_LE(r.pairs_gated, r.pairs_tested);
  }
  cfg.ap_m = 1.1;
  for (const EpochRecord& r : run_simulation(cfg)) {
    EXPECT_FALSE(r.gate_active);
    EXPECT_EQ(r.pairs_tested, 0u);
  }
}

TEST(Simulation, CsvLayout) {
  SimConfig cfg = small_config(0.0, 0.0);
  cfg.epochs = 1;
  std::ostringstream out;
  write_epoch_csv(out, run_simulation(cfg), cfg.categories);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "epoch,ap50_all,ap50_fire,ap50_smoke,ap50_other,apss_all,apss_fire,apss_smoke,"
            "apss_other,gate_active,pairs_tested,pairs_gated,mean_gated_loss,mean_ungated_loss");
  EXPECT_NE(text.find("\n0,1.000000,"), std::string::npos);
}

TEST(SimConfigCheck, Validation) {
  SimConfig cfg = small_config(0.0, 0.0);
  cfg.epochs = 0;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = small_config(1.5, 0.0);
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = small_config(0.0, 0.0);
  cfg.scenes[1].image_id = cfg.scenes[0].image_id;
  EXPECT_THROW(cfg.validate(), ContractViolation);
}

}  // namespace
}  // namespace selfsim
