#include <benchmark/benchmark.h>

#include "eval3d/assets/primitives.h"
#include "eval3d/assets/tri_mesh.h"
#include "eval3d/raster/rasterizer.h"
#include "eval3d/raster/visibility.h"

namespace eval3d {
namespace {

RigSpec Rig(int views, int resolution) {
  RigSpec spec;
  spec.n_views = views;
  spec.resolution = resolution;
  return spec;
}

// Arguments: icosphere subdivisions, resolution.
void BM_Rasterize(benchmark::State& state) {
  const TriMesh mesh = PrepareMesh(MakeIcosphere(static_cast<int>(state.range(0))));
  const CameraView view = MakeView(0, 30, 15, Rig(1, static_cast<int>(state.range(1))));
  for (auto _ : state) {
    RenderBuffers b = Rasterize(mesh, view);
    benchmark::DoNotOptimize(b.depth.data());
  }
  state.SetItemsProcessed(state.iterations() * view.width * view.height);
}
BENCHMARK(BM_Rasterize)->Args({3, 256})->Args({5, 512})->Unit(benchmark::kMillisecond);

void BM_Visibility120Views(benchmark::State& state) {
  const TriMesh mesh = PrepareMesh(MakeIcosphere(4));
  const auto rig = BuildRig(Rig(120, static_cast<int>(state.range(0))));
  for (auto _ : state) {
    VisibilityTable t = ComputeVisibility(mesh, rig);
    benchmark::DoNotOptimize(t.counts().data());
  }
}
BENCHMARK(BM_Visibility120Views)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace eval3d
