#include <gtest/gtest.h>
#include <gmock/gmock.h>

#include <sstream>

#include "selfsim/formats.hpp"
#include "selfsim/fractal.hpp"
#include "selfsim/pgm.hpp"
#include "test_support.hpp"
#include "cli.hpp"

namespace selfsim {
namespace {

using ::testing::HasSubstr;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  testing::TempDir dir_;
};

TEST_F(CliTest, HelpAndUsage) {
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"hd", "--a", "x.pgm"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
}

TEST_F(CliTest, HdIdenticalImages) {
  write_pgm(mask_to_image(gen_sierpinski(3, 64)), path("x.pgm"));
  const CliResult r = run({"hd", "--a", path("x.pgm"), "--b", path("x.pgm")});
  EXPECT_EQ(r.code, 0);
  EXPECT_THAT(r.out, HasSubstr("symmetric 0\n"));
}

TEST_F(CliTest, HdEmptyForegroundIsInf) {
  write_pgm(GrayImage(16, 16, 0), path("blank.pgm"));
  write_pgm(mask_to_image(gen_disk(16, 16)), path("disk.pgm"));
  const CliResult r = run({"hd", "--a", path("blank.pgm"), "--b", path("disk.pgm")});
  EXPECT_EQ(r.code, 0);
  EXPECT_THAT(r.out, HasSubstr("symmetric inf"));
}

TEST_F(CliTest, HdMissingFileIsDataError) {
  const CliResult r = run({"hd", "--a", path("nope.pgm"), "--b", path("nope.pgm")});
  EXPECT_EQ(r.code, cli::kExitDataError);
  EXPECT_THAT(r.err, HasSubstr("nope.pgm"));
}

TEST_F(CliTest, BadBinarizeIsUsage) {
  write_pgm(GrayImage(4, 4, 0), path("x.pgm"));
  EXPECT_EQ(run({"hd", "--a", path("x.pgm"), "--b", path("x.pgm"), "--binarize", "mean"}).code,
            cli::kExitUsage);
}

TEST_F(CliTest, ContourWritesJson) {
  write_pgm(mask_to_image(gen_disk(20, 20)), path("d.pgm"));
  const CliResult r = run({"contour", "--image", path("d.pgm"), "--out", path("c.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = read_json(path("c.json"));
  EXPECT_GT(doc["points"].size(), 10u);
}

TEST_F(CliTest, GateCsv) {
  SceneSpec spec{1, 1, 320, 320, {}};
  spec.objects.push_back({ObjectKind::Sierpinski, {32, 32, 288, 288}, 1, 5, 4});
  const SyntheticScene s = compose_scene(spec);
  write_pgm(s.image, path("scene.pgm"));
  const BBox gt = s.gts[0].box;
  const BBox part = s.fractal_regions[0][0];
  nlohmann::json pairs = nlohmann::json::array();
  auto corner = [](const BBox& b) { return nlohmann::json{b.left(), b.top(), b.w, b.h}; };
  pairs.push_back({{"image", "scene.pgm"}, {"pred_bbox", corner(part)}, {"gt_bbox", corner(gt)}});
  pairs.push_back({{"image", "scene.pgm"}, {"pred_bbox", corner(gt)}, {"gt_bbox", corner(gt)}});
  write_json(pairs, path("pairs.json"));
  const CliResult r = run({"gate", "--pairs", path("pairs.json"), "--out", path("g.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = testing::slurp(path("g.csv"));
  std::istringstream lines(csv);
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  EXPECT_THAT(header, HasSubstr("gated_ciou_loss"));
  EXPECT_THAT(first, HasSubstr(",0,1,"));   // indicator 0, is_fractal 1
  EXPECT_THAT(second, HasSubstr(",inf,1,0,"));
}

TEST_F(CliTest, GateBadPairIsDataErrorWithoutOutput) {
  testing::spit(path("pairs.json"), R"([{"image": "missing.pgm", "pred_bbox": [0,0,4,4], "gt_bbox": [0,0,4,4]}])");
  const CliResult r = run({"gate", "--pairs", path("pairs.json"), "--out", path("g.csv")});
  EXPECT_EQ(r.code, cli::kExitDataError);
  EXPECT_FALSE(std::filesystem::exists(path("g.csv")));
}

TEST_F(CliTest, EvalApssNeedsImages) {
  ASSERT_EQ(run({"gen", "--kind", "scene", "--count", "2", "--width", "256", "--height", "256",
                 "--min-side", "64", "--max-side", "96", "--out-dir", path("suite"), "--detections"})
                .code,
            0);
  const CliResult r = run({"eval", "--gt", path("suite/annotations.json"), "--det",
                     path("suite/detections.json"), "--mode", "apss"});
  EXPECT_EQ(r.code, cli::kExitDataError);
  EXPECT_THAT(r.err, HasSubstr("images required for AP-ss"));
}

TEST_F(CliTest, EvalWithCacheReusesContours) {
  ASSERT_EQ(run({"gen", "--kind", "scene", "--count", "3", "--width", "256", "--height", "256",
                 "--min-side", "64", "--max-side", "96", "--out-dir", path("suite"), "--detections",
                 "--fractal-prob", "0.7"})
                .code,
            0);
  const std::vector<std::string> base{"eval", "--gt", path("suite/annotations.json"), "--det",
                                      path("suite/detections.json"), "--mode", "apss",
                                      "--th-hd", "0.5"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  };
  const CliResult first = with({"--images", path("suite"), "--contour-cache", path("cache.json"),
                          "--out", path("r1.json")});
  ASSERT_EQ(first.code, 0) << first.err;
  ASSERT_TRUE(std::filesystem::exists(path("cache.json")));
  const CliResult second = with({"--contour-cache", path("cache.json"), "--out", path("r2.json")});
  ASSERT_EQ(second.code, 0) << second.err;
  EXPECT_EQ(testing::slurp(path("r1.json")), testing::slurp(path("r2.json")));
  const auto report = read_json(path("r1.json"));
  EXPECT_GE(report["map"].get<double>(), 0.0);
  EXPECT_LE(report["map"].get<double>(), 1.0);
}

TEST_F(CliTest, GenSingleImages) {
  for (const std::string kind : {"sierpinski", "plume", "disk"}) {
    const CliResult r = run({"gen", "--kind", kind, "--size", "64", "--depth", "3", "--out", path(kind + ".pgm")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(load_pgm(path(kind + ".pgm")).width(), 64);
  }
  EXPECT_EQ(run({"gen", "--kind", "sierpinski", "--size", "16", "--depth", "5", "--out", path("t.pgm")}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"gen", "--kind", "cube", "--out", path("t.pgm")}).code, cli::kExitUsage);
}

TEST_F(CliTest, SimulateFromToml) {
  testing::spit(path("sim.toml"), R"(
seed = 2
epochs = 2
[[category]]
id = 1
name = "fire"
self_similar = true
kind = "sierpinski"
[[category]]
id = 3
name = "other"
kind = "solid"
[scene_gen]
count = 3
width = 192
height = 192
objects = 2
min_side = 48
max_side = 80
)");
  const CliResult r = run({"simulate", "--config", path("sim.toml"), "--out", path("sim.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = testing::slurp(path("sim.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  testing::spit(path("bad.toml"), "seed = \n");
  const CliResult bad = run({"simulate", "--config", path("bad.toml"), "--out", path("bad.csv")});
  EXPECT_EQ(bad.code, cli::kExitDataError);
  EXPECT_THAT(bad.err, HasSubstr("line 1"));
}

}  // namespace
}  // namespace selfsim
