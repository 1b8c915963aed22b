#include <benchmark/benchmark.h>

#include "eval3d/backends/tensor_file.h"

namespace eval3d {
namespace {

Tensor Features(int channels) {
  return Tensor::Zeros(DType::kF32, {static_cast<uint64_t>(channels), 256, 256});
}

void BM_EncodeTensor(benchmark::State& state) {
  const Tensor t = Features(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto bytes = EncodeTensor(t);
    benchmark::DoNotOptimize(bytes.data());
  }
  state.SetBytesProcessed(state.iterations() * t.element_count() * 4);
}
BENCHMARK(BM_EncodeTensor)->Arg(64)->Arg(384);

void BM_DecodeTensor(benchmark::State& state) {
  const auto bytes = EncodeTensor(Features(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    Tensor t = DecodeTensor(bytes);
    benchmark::DoNotOptimize(t.f32().data());
  }
  state.SetBytesProcessed(state.iterations() * bytes.size());
}
BENCHMARK(BM_DecodeTensor)->Arg(64)->Arg(384);

}  // namespace
}  // namespace eval3d
