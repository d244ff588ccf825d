#include <benchmark/benchmark.h>

#include "dcf/solver.hpp"

using namespace dcf;

static void BM_SolveSaturated(benchmark::State& state) {
  Scenario s = preset("dot11b-dsss");
  s.n = static_cast<int>(state.range(0));
  solver::SolverOptions opts;
  opts.mode = solver::SolveMode::Saturated;
  for (auto _ : state) {
    auto sol = solver::solve(s, opts);
    benchmark::DoNotOptimize(sol.metrics.throughput);
  }
}
BENCHMARK(BM_SolveSaturated)->Arg(5)->Arg(10)->Arg(50);

static void BM_SolveUnsaturated(benchmark::State& state) {
  Scenario s = preset("dot11b-dsss");
  s.n = 10;
  s.traffic.lambda = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto sol = solver::solve(s);
    benchmark::DoNotOptimize(sol.metrics.throughput);
  }
}
BENCHMARK(BM_SolveUnsaturated)->Arg(2)->Arg(20)->Arg(60);
