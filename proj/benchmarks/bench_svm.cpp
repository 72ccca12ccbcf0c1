#include <benchmark/benchmark.h>

#include <random>

#include "gsift/svm.hpp"

namespace {

std::vector<gsift::LabeledSample> blobs(std::size_t n, std::size_t dim) {
  std::mt19937 gen(4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<gsift::LabeledSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].y = i % 2 == 0 ? 1 : -1;
    out[i].x.resize(dim);
    for (auto& v : out[i].x) v = g(gen) + 0.5 * out[i].y;
  }
  return out;
}

void BM_Train(benchmark::State& state, gsift::KernelSpec kernel) {
  const auto data = blobs(static_cast<std::size_t>(state.range(0)), 256);
  kernel = gsift::with_default_gamma(kernel, 256);
  for (auto _ : state) benchmark::DoNotOptimize(gsift::train(data, kernel));
}
BENCHMARK_CAPTURE(BM_Train, linear, gsift::KernelSpec::linear())->Arg(108)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Train, rbf, gsift::KernelSpec::rbf(0.0))->Arg(108)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Gram(benchmark::State& state) {
  const auto data = blobs(static_cast<std::size_t>(state.range(0)), 19200);
  std::vector<std::vector<double>> xs;
  for (const auto& s : data) xs.push_back(s.x);
  for (auto _ : state) benchmark::DoNotOptimize(gsift::gram_matrix(gsift::KernelSpec::quadratic(), xs));
}
BENCHMARK(BM_Gram)->Arg(108)->Unit(benchmark::kMillisecond);

}  // namespace
