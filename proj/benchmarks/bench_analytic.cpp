#include <vector>

#include <benchmark/benchmark.h>

#include "unb/analytic.hpp"
#include "unb/optimize.hpp"

namespace {

unb::Scenario reference(int bands, int reps) {
  unb::NetworkConfig net;
  net.bands = bands;
  net.repetitions = reps;
  net.device_density = 30000.0 * net.bs_density;
  return unb::make_scenario(net, unb::lora_type1(net, 1000.0));
}

unb::Scenario heterogeneous(int bands) {
  unb::NetworkConfig net;
  net.bands = bands;
  net.device_density = 30000.0 * net.bs_density;
  net.sinr_threshold = unb::db_to_linear(10.0);
  std::vector<double> load(bands);
  for (int m = 0; m < bands; ++m) load[m] = 1000.0 * (m % 3) * (m % 3);
  return unb::make_scenario(net, unb::lora_type2(net, load));
}

void BM_NoAssoc(benchmark::State& state) {
  const auto sc = reference(5, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(unb::analytic::ps_no_assoc(sc));
}
BENCHMARK(BM_NoAssoc)->Arg(1)->Arg(3)->Arg(20);

void BM_Nearest(benchmark::State& state) {
  const auto sc = reference(5, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(unb::analytic::ps_nearest(sc));
}
BENCHMARK(BM_Nearest)->Arg(1)->Arg(3)->Arg(20);

void BM_PnNearest(benchmark::State& state) {
  const auto sc = reference(5, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(unb::analytic::ps_pn_nearest(sc));
}
BENCHMARK(BM_PnNearest)->Arg(3)->Arg(20);

void BM_Compositions(benchmark::State& state) {
  const int reps = static_cast<int>(state.range(0));
  const int bands = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(unb::analytic::compositions(reps, bands));
}
BENCHMARK(BM_Compositions)->Args({3, 5})->Args({8, 5})->Args({10, 8});

void BM_BandHopped(benchmark::State& state) {
  const auto sc = reference(static_cast<int>(state.range(1)), static_cast<int>(state.range(0)));
  const std::vector<double> p(sc.net.bands, 1.0 / sc.net.bands);
  const auto table = unb::analytic::compositions(sc.net.repetitions, sc.net.bands);
  for (auto _ : state) benchmark::DoNotOptimize(unb::analytic::ps_band_hopped(sc, p, table));
}
BENCHMARK(BM_BandHopped)->Args({3, 5})->Args({8, 5})->Args({10, 8});

void BM_CapacityNumeric(benchmark::State& state) {
  const auto sc = reference(5, 3);
  unb::ProtocolSpec spec;
  spec.protocol = unb::Protocol::BandHopped;
  for (auto _ : state) benchmark::DoNotOptimize(unb::analytic::tc_numeric(0.98, sc, spec));
}
BENCHMARK(BM_CapacityNumeric);

void BM_OptimizeBandConstrained(benchmark::State& state) {
  const auto c = unb::optimize::band_costs(heterogeneous(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(unb::optimize::optimize_band_constrained(c));
}
BENCHMARK(BM_OptimizeBandConstrained)->Arg(5)->Arg(16);

void BM_OptimizeBandHopped(benchmark::State& state) {
  const auto sc = heterogeneous(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(unb::optimize::optimize_band_hopped(sc));
}
BENCHMARK(BM_OptimizeBandHopped)->Arg(5)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
