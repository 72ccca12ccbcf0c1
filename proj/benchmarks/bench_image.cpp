#include <benchmark/benchmark.h>

#include <random>

#include "gsift/colorspace.hpp"
#include "gsift/image.hpp"

namespace {

gsift::GrayImage noise(int side) {
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> d(static_cast<std::size_t>(side) * side);
  for (auto& v : d) v = u(gen);
  return gsift::GrayImage(side, side, d);
}

void BM_GaussianBlur(benchmark::State& state) {
  const gsift::GrayImage img = noise(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gsift::gaussian_blur(img, 1.6));
  state.SetItemsProcessed(state.iterations() * img.size());
}
BENCHMARK(BM_GaussianBlur)->Arg(128)->Arg(256)->Arg(512);

void BM_RgbToHsv(benchmark::State& state) {
  std::mt19937 gen(2);
  std::vector<std::uint8_t> px(3 * 4096);
  for (auto& v : px) v = static_cast<std::uint8_t>(gen());
  for (auto _ : state) {
    for (std::size_t i = 0; i < px.size(); i += 3) benchmark::DoNotOptimize(gsift::rgb_to_hsv(px[i], px[i + 1], px[i + 2]));
  }
  state.SetItemsProcessed(state.iterations() * (px.size() / 3));
}
BENCHMARK(BM_RgbToHsv);

void BM_SkinMaskAndRois(benchmark::State& state) {
  std::mt19937 gen(3);
  gsift::RgbImage img(320, 240);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(gen());
  for (auto _ : state) benchmark::DoNotOptimize(gsift::extract_rois(gsift::skin_mask(img)));
}
BENCHMARK(BM_SkinMaskAndRois);

}  // namespace
