#include <benchmark/benchmark.h>

#include "selfsim/contour_cache.hpp"
#include "selfsim/evaluator.hpp"
#include "selfsim/fractal.hpp"
#include "selfsim/geometry.hpp"
#include "selfsim/pgm.hpp"
#include "selfsim/rng.hpp"
#include "selfsim/training_sim.hpp"

namespace {

using namespace selfsim;

std::pair<Contour, Contour> contour_pair(std::size_t n) {
  const GrayImage img = mask_to_image(gen_sierpinski(5, static_cast<int>(n)));
  const BBox whole = BBox::from_corner(0, 0, static_cast<double>(n), static_cast<double>(n));
  const auto parts = sierpinski_subregions(static_cast<int>(n), static_cast<int>(n));
  return {normalize_contour(*extract_pixel_contour(img, whole).contour),
          normalize_contour(*extract_pixel_contour(img, parts[0]).contour)};
}

void BM_HausdorffNaive(benchmark::State& state) {
  const auto [a, b] = contour_pair(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff(a, b, HausdorffKernel::Naive));
  state.counters["points"] = static_cast<double>(a.size() + b.size());
}
BENCHMARK(BM_HausdorffNaive)->Arg(128)->Arg(256)->Arg(512);

void BM_HausdorffEarlyBreak(benchmark::State& state) {
  const auto [a, b] = contour_pair(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff(a, b, HausdorffKernel::EarlyBreak));
  state.counters["points"] = static_cast<double>(a.size() + b.size());
}
BENCHMARK(BM_HausdorffEarlyBreak)->Arg(128)->Arg(256)->Arg(512);

void BM_ExtractContour(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GrayImage img = gen_plume(7, n, 4);
  const BBox whole = BBox::from_corner(0, 0, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(extract_pixel_contour(img, whole));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_ExtractContour)->Arg(128)->Arg(512);

void BM_EvaluateApss(benchmark::State& state) {
  const std::vector<Category> cats{{1, "fire", true}, {2, "smoke", true}, {3, "other", false}};
  SimConfig sim;
  sim.categories = cats;
  sim.schedule = {0.2, 0.2, 0.5, 0.1, 0.3};
  Dataset ds;
  ds.categories = cats;
  std::vector<GrayImage> images;
  std::vector<Detection> dets;
  for (int i = 0; i < 20; ++i) {
    const auto spec = random_scene_spec(static_cast<std::uint64_t>(i), i + 1, 384, 384, 3,
                                        {ObjectKind::Sierpinski, ObjectKind::Plume, ObjectKind::Solid},
                                        {1, 2, 3}, 96, 160);
    SyntheticScene scene = compose_scene(spec);
    Rng rng(static_cast<std::uint64_t>(i));
    const auto d = stub_detect(scene, 0, sim, rng);
    dets.insert(dets.end(), d.begin(), d.end());
    ds.images.push_back({i + 1, "", 384, 384});
    ds.ground_truth.insert(ds.ground_truth.end(), scene.gts.begin(), scene.gts.end());
    images.push_back(std::move(scene.image));
  }
  EvalConfig cfg;
  cfg.mode = EvalMode::APss;
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    CachingContourSource src([&](ImageId id) { return images[static_cast<std::size_t>(id - 1)]; },
                             nullptr, {});
    benchmark::DoNotOptimize(evaluate(ds, dets, cfg, &src));
  }
}
BENCHMARK(BM_EvaluateApss)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
