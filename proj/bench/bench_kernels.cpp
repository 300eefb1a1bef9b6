// Kernel timings: grid DP (OpenMP against the serial reference), exact DP
// stages, and the forecast-horizon search.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "storhz/horizon.hpp"
#include "storhz/oracle.hpp"
#include "storhz/solver.hpp"

namespace {

using namespace storhz;

const StorageSpec kFast{0, 10, 1, 1, 0.9, 0.9, 1, 5, 1};

PriceSeries daily_prices(std::size_t n) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.02);
  const double pi = std::acos(-1.0);
  std::vector<double> c(n);
  for (std::size_t t = 0; t < n; ++t) c[t] = 0.08 + 0.05 * std::sin(2 * pi * double(t % 24) / 24) + noise(rng);
  return PriceSeries(c, -0.5, 4.0);
}

void BM_GridParallel(benchmark::State& state) {
  const auto p = daily_prices(24);
  const GridSpec g = matched_grid(kFast, std::size_t(state.range(0)));
  const IndexWindow all{0, g.state_points - 1};
  for (auto _ : state) benchmark::DoNotOptimize(grid_dp_solve(kFast, p, 24, all, g));
}

void BM_GridSerial(benchmark::State& state) {
  const auto p = daily_prices(24);
  const GridSpec g = matched_grid(kFast, std::size_t(state.range(0)));
  const IndexWindow all{0, g.state_points - 1};
  for (auto _ : state) benchmark::DoNotOptimize(grid_dp_solve_serial(kFast, p, 24, all, g));
}

void BM_ForwardValues(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto p = daily_prices(n);
  for (auto _ : state) benchmark::DoNotOptimize(forward_values(kFast, p, n));
  state.SetComplexityN(state.range(0));
}

void BM_MinForecastHorizon(benchmark::State& state) {
  const auto p = daily_prices(24 * 14);
  for (auto _ : state) benchmark::DoNotOptimize(min_forecast_horizon(kFast, p, 24, p.size()));
}

}  // namespace

BENCHMARK(BM_GridParallel)->Arg(201)->Arg(801)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSerial)->Arg(201)->Arg(801)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardValues)->RangeMultiplier(4)->Range(24, 1536)->Complexity()->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MinForecastHorizon)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
