#include <benchmark/benchmark.h>

#include "gsift/feature_encode.hpp"
#include "gsift/sift.hpp"
#include "gsift/synthetic.hpp"

namespace {

void BM_Extract(benchmark::State& state) {
  const gsift::GrayImage face = gsift::synthetic_face_crop(-1, 100);
  std::size_t n = 0;
  for (auto _ : state) {
    const auto kps = gsift::extract(face);
    n = kps.size();
    benchmark::DoNotOptimize(kps.data());
  }
  state.counters["keypoints"] = static_cast<double>(n);
}
BENCHMARK(BM_Extract)->Unit(benchmark::kMillisecond);

void BM_ExtractAndEncode(benchmark::State& state) {
  const gsift::GrayImage face = gsift::synthetic_face_crop(1, 7);
  for (auto _ : state) benchmark::DoNotOptimize(gsift::encode(gsift::select_keypoints(gsift::extract(face))));
}
BENCHMARK(BM_ExtractAndEncode)->Unit(benchmark::kMillisecond);

}  // namespace
