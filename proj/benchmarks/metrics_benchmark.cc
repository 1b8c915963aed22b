#include <benchmark/benchmark.h>

#include "eval3d/assets/primitives.h"
#include "eval3d/assets/tri_mesh.h"
#include "eval3d/metrics/depth_normal.h"
#include "eval3d/metrics/geometric.h"
#include "eval3d/raster/rasterizer.h"

namespace eval3d {
namespace {

RenderBuffers SphereBuffers(int resolution) {
  RigSpec spec;
  spec.resolution = resolution;
  return Rasterize(PrepareMesh(MakeIcosphere(5)), MakeView(0, 20, 15, spec));
}

void BM_DepthToNormal(benchmark::State& state) {
  const RenderBuffers b = SphereBuffers(static_cast<int>(state.range(0)));
  RigSpec spec;
  spec.resolution = static_cast<int>(state.range(0));
  const Intrinsics k = MakeView(0, 20, 15, spec).intrinsics;
  for (auto _ : state) {
    auto normals = DepthToNormal(b.depth, k, b.opacity);
    benchmark::DoNotOptimize(normals.data());
  }
}
BENCHMARK(BM_DepthToNormal)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_AlignDepth(benchmark::State& state) {
  const RenderBuffers b = SphereBuffers(512);
  Grid<float> pred = b.depth;
  for (float& v : pred.pixels()) v = 2.0f * v + 1.0f;
  for (auto _ : state) {
    DepthAlignment a = AlignDepth(pred, b.depth, b.opacity);
    benchmark::DoNotOptimize(a.scale);
  }
}
BENCHMARK(BM_AlignDepth)->Unit(benchmark::kMillisecond);

void BM_GeometricConsistency(benchmark::State& state) {
  const RenderBuffers b = SphereBuffers(512);
  const std::vector<Grid<Eigen::Vector3f>> normals(12, b.normal);
  const std::vector<Grid<uint8_t>> masks(12, b.opacity);
  for (auto _ : state) {
    GeoResult r = GeometricConsistency(normals, normals, masks, GeoConfig{});
    benchmark::DoNotOptimize(r.score.value);
  }
}
BENCHMARK(BM_GeometricConsistency)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace eval3d
