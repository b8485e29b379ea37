#include <benchmark/benchmark.h>

#include "unb/simulate.hpp"

namespace {

unb::Scenario reference(int bands) {
  unb::NetworkConfig net;
  net.bands = bands;
  net.device_density = 30000.0 * net.bs_density;
  return unb::make_scenario(net, unb::lora_type1(net, 1000.0));
}

unb::ProtocolSpec protocol(int index) {
  unb::ProtocolSpec s;
  switch (index) {
    case 0: s.protocol = unb::Protocol::NoAssociation; break;
    case 1: s.protocol = unb::Protocol::NearestBS; s.hopping = unb::Hopping::PN; break;
    default: s.protocol = unb::Protocol::BandHopped; break;
  }
  return s;
}

// One spatial realization: drawing plus SINR evaluation.
void BM_Realization(benchmark::State& state) {
  const auto sc = reference(static_cast<int>(state.range(0)));
  const unb::sim::Engine engine(sc, protocol(static_cast<int>(state.range(1))), {});
  std::int64_t i = 0;
  for (auto _ : state) {
    const auto r = engine.draw(i++);
    benchmark::DoNotOptimize(engine.evaluate(r));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Realization)->Args({1, 0})->Args({5, 0})->Args({5, 1})->Args({5, 2});

void BM_Hppp(benchmark::State& state) {
  unb::sim::Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(unb::sim::sample_hppp(1.0, 30.0, rng));
}
BENCHMARK(BM_Hppp);

void BM_Run(benchmark::State& state) {
  const auto sc = reference(5);
  unb::sim::SimConfig sim;
  sim.realizations = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(unb::sim::run(sc, protocol(0), sim));
  state.SetItemsProcessed(state.iterations() * sim.realizations);
}
BENCHMARK(BM_Run)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
