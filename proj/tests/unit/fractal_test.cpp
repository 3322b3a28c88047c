#include <gtest/gtest.h>

#include <cmath>

#include "selfsim/errors.hpp"
#include "selfsim/fractal.hpp"
#include "selfsim/mask.hpp"
#include "selfsim/pgm.hpp"

namespace selfsim {
namespace {

TEST(Sierpinski, DepthZeroIsFilledTriangle) {
  const BinaryMask m = gen_sierpinski(0, 64);
  EXPECT_EQ(max_component(m), m);
  const double ratio = static_cast<double>(m.count()) / (64.0 * 64.0);
  EXPECT_NEAR(ratio, 0.5, 0.05);
  const Contour c = trace_outer_contour(m);
  EXPECT_GT(c.size(), 100u);
}

TEST(Sierpinski, AreaRatioFollowsThreeQuarters) {
  const BinaryMask d0 = gen_sierpinski(0, 256);
  const BinaryMask d3 = gen_sierpinski(3, 256);
  const double ratio = static_cast<double>(d3.count()) / static_cast<double>(d0.count());
  EXPECT_NEAR(ratio, 0.421875, 0.05 * 0.421875);
}

TEST(Sierpinski, StaysConnected) {
  for (int depth = 1; depth <= 5; ++depth) {
    const BinaryMask m = gen_sierpinski(depth, 256);
    EXPECT_EQ(max_component(m).count(), m.count()) << "depth " << depth;
  }
}

TEST(Sierpinski, SubTrianglesResembleWhole) {
  const GrayImage img = mask_to_image(gen_sierpinski(5, 512));
  const PixelExtraction whole = extract_pixel_contour(img, BBox::from_corner(0, 0, 512, 512));
  for (const BBox& part : sierpinski_subregions(512, 512)) {
    EXPECT_LE(normalized_hausdorff(extract_pixel_contour(img, part), whole).symmetric, 0.1);
  }
}

TEST(Sierpinski, TooSmallForDepth) {
  EXPECT_THROW(gen_sierpinski(6, 32), ContractViolation);
  EXPECT_THROW(gen_sierpinski(-1, 32), ContractViolation);
}

TEST(Plume, Deterministic) {
  EXPECT_EQ(gen_plume(9, 128, 4), gen_plume(9, 128, 4));
  EXPECT_NE(gen_plume(9, 128, 4), gen_plume(10, 128, 4));
}

TEST(Plume, HasForeground) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GrayImage p = gen_plume(seed, 96, 4);
    EXPECT_GT(max_component(binarize(p)).count(), 0u) << "seed " << seed;
  }
}

TEST(Disk, RoundAndCentered) {
  const BinaryMask d = gen_disk(101, 101);
  EXPECT_TRUE(d.get(50, 50));
  EXPECT_FALSE(d.get(0, 0));
  EXPECT_NEAR(static_cast<double>(d.count()) / (101.0 * 101.0), M_PI / 4, 0.02);
}

TEST(Scene, SingleSierpinski) {
  SceneSpec spec{1, 5, 200, 200, {}};
  spec.objects.push_back({ObjectKind::Sierpinski, {20, 20, 148, 148}, 1, 3, 4});
  const SyntheticScene s = compose_scene(spec);
  ASSERT_EQ(s.gts.size(), 1u);
  EXPECT_EQ(s.gts[0].image_id, 5);
  EXPECT_EQ(s.gts[0].box, BBox::from_corner(20, 20, 128, 128));
  EXPECT_EQ(s.fractal_regions[0].size(), 3u);
}

TEST(Scene, EmptySceneIsBlank) {
  const SyntheticScene s = compose_scene({1, 1, 32, 16, {}});
  EXPECT_TRUE(s.gts.empty());
  EXPECT_EQ(s.image, GrayImage(32, 16, 0));
}

TEST(Scene, RandomScenesAreDeterministic) {
  const std::vector<ObjectKind> kinds{ObjectKind::Sierpinski, ObjectKind::Plume, ObjectKind::Solid};
  const auto a = random_scene_spec(77, 1, 512, 512, 5, kinds, {1, 2, 3}, 64, 128);
  const auto b = random_scene_spec(77, 1, 512, 512, 5, kinds, {1, 2, 3}, 64, 128);
  const SyntheticScene sa = compose_scene(a), sb = compose_scene(b);
  EXPECT_EQ(sa.image, sb.image);
  EXPECT_EQ(sa.gts, sb.gts);
  EXPECT_EQ(sa.gts.size(), 5u);
}

TEST(Scene, OverlapAndOutOfBoundsRejected) {
  SceneSpec spec{1, 1, 100, 100, {}};
  spec.objects.push_back({ObjectKind::Solid, {0, 0, 50, 50}, 3});
  spec.objects.push_back({ObjectKind::Solid, {40, 40, 90, 90}, 3});
  EXPECT_THROW(compose_scene(spec), DataError);
  spec.objects.pop_back();
  spec.objects.push_back({ObjectKind::Solid, {60, 60, 120, 90}, 3});
  EXPECT_THROW(compose_scene(spec), DataError);
}

TEST(ObjectKindText, RoundTrip) {
  for (ObjectKind k : {ObjectKind::Sierpinski, ObjectKind::Plume, ObjectKind::Solid}) {
    EXPECT_EQ(parse_object_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_object_kind("cube"), DataError);
}

}  // namespace
}  // namespace selfsim
