#include <benchmark/benchmark.h>

#include "dcf/simulator.hpp"

using namespace dcf;

static void BM_SimulatedSecond(benchmark::State& state) {
  Scenario s = preset("dot11b-dsss");
  s.n = static_cast<int>(state.range(0));
  s.traffic.lambda = 30.0;
  sim::SimConfig cfg;
  cfg.duration = 2.0;
  cfg.warmup = 0.5;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.seed = seed++;
    auto m = sim::run(s, cfg);
    benchmark::DoNotOptimize(m.throughput.mean);
  }
  state.SetItemsProcessed(state.iterations() * 2);  // simulated seconds
}
BENCHMARK(BM_SimulatedSecond)->Arg(4)->Arg(10)->Arg(25);

BENCHMARK_MAIN();
