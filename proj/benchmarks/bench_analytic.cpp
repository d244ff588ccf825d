#include <benchmark/benchmark.h>

#include "dcf/analytic.hpp"

using namespace dcf;

static void BM_B00(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    double v = analytic::b00(0.3, 0.8, 32, m, std::min(5, m));
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_B00)->Arg(1)->Arg(7)->Arg(15);

static void BM_CaptureProb(benchmark::State& state) {
  ChannelConfig ch;
  ch.capture_enabled = true;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    double v = analytic::capture_prob(0.05, n, ch);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_CaptureProb)->Arg(5)->Arg(20)->Arg(100);

static void BM_HoqSlots(benchmark::State& state) {
  for (auto _ : state) {
    double v = analytic::hoq_slots(0.45, 32, 7, 5);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_HoqSlots);
