#include <benchmark/benchmark.h>

#include <random>

#include "dst/filter_bank.hpp"
#include "dst/spectral.hpp"

namespace {

dst::Plane noise(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d(0.5, 0.2);
  dst::Plane p(w, h);
  for (auto& v : p.data) v = d(rng);
  return p;
}

void BM_FilterBank(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dst::FilterBank(n, n));
}
BENCHMARK(BM_FilterBank)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_RawFeatures(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dst::Plane p = noise(n, n, 1);
  const dst::FilterBank bank(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(dst::spectral_features(p, bank));
}
BENCHMARK(BM_RawFeatures)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_DecoupledFeatures(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dst::Plane p = noise(n, n, 2);
  const dst::FilterBank bank(n, n);
  const auto ref = dst::SpectralReference::for_grid(bank);
  for (auto _ : state) benchmark::DoNotOptimize(dst::decoupled_spectral_features(p, bank, ref));
}
BENCHMARK(BM_DecoupledFeatures)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ExtractKernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dst::Plane sharp = noise(n, n, 3);
  dst::EquivalentKernel blur;
  blur.exponents = {-1.5, -0.6, -0.1, 0.0};
  const dst::Plane blurred = dst::apply_kernel(sharp, blur);
  for (auto _ : state) benchmark::DoNotOptimize(dst::extract_diffusion_kernel(blurred, sharp));
}
BENCHMARK(BM_ExtractKernel)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
