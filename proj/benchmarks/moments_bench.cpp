#include <benchmark/benchmark.h>

#include <random>

#include "dst/moments.hpp"
#include "dst/ortho_flow.hpp"

namespace {

std::vector<double> gamma_sample(std::size_t n, double shape, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> d(shape, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

void BM_AnalyzeMoments(benchmark::State& state) {
  const auto x = gamma_sample(static_cast<std::size_t>(state.range(0)), 2.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dst::analyze_moments(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AnalyzeMoments)->Range(1 << 12, 1 << 20);

void BM_TransferMoments(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const dst::Sample src{gamma_sample(n, 2.0, 1), {}};
  const dst::MomentFeatures target = dst::analyze_moments(gamma_sample(n, 6.0, 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dst::transfer_moments(src, target, dst::MomentOrders::prefix(4)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TransferMoments)->Range(1 << 12, 1 << 18)->Unit(benchmark::kMillisecond);

void BM_CubicProjection(benchmark::State& state) {
  const auto x = gamma_sample(static_cast<std::size_t>(state.range(0)), 2.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(dst::cubic_projection_coefficients(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CubicProjection)->Range(1 << 12, 1 << 20);

}  // namespace
