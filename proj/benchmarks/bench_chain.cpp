#include <benchmark/benchmark.h>

#include "dcf/chain.hpp"

using namespace dcf::chain;

static void BM_BuildChain(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto c = build_chain({w, 4, 4, 0.35, 0.6});
    benchmark::DoNotOptimize(c.n_states());
  }
}
BENCHMARK(BM_BuildChain)->Arg(2)->Arg(8)->Arg(16);

static void BM_StationaryDirect(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const auto c = build_chain({w, 4, 4, 0.35, 0.6});
  for (auto _ : state) {
    auto d = stationary(c);
    benchmark::DoNotOptimize(d.mass_e);
  }
  state.SetLabel(std::to_string(c.n_states()) + " states");
}
BENCHMARK(BM_StationaryDirect)->Arg(2)->Arg(8)->Arg(16);

static void BM_StationaryPower(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const auto c = build_chain({w, 4, 4, 0.35, 0.6});
  for (auto _ : state) {
    auto d = stationary_power(c, 1e-13);
    benchmark::DoNotOptimize(d.mass_e);
  }
}
BENCHMARK(BM_StationaryPower)->Arg(2)->Arg(8);
