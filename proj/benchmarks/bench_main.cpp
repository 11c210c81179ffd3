#include <numbers>

#include <benchmark/benchmark.h>

#include "mixdisc/adaptive.hpp"
#include "mixdisc/blocks.hpp"
#include "mixdisc/helstrom.hpp"
#include "mixdisc/local.hpp"
#include "mixdisc/sdp.hpp"

namespace {

const mixdisc::StatePair kPair = mixdisc::make_state_pair(0.8, 0.8, std::numbers::pi / 2);

void BM_BlockMapTable(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mixdisc::BlockMapTable(n));
}
BENCHMARK(BM_BlockMapTable)->Arg(10)->Arg(25)->Arg(35)->Unit(benchmark::kMillisecond);

void BM_SigmaBlocks(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mixdisc::sigma_blocks(kPair, 0, n));
}
BENCHMARK(BM_SigmaBlocks)->Arg(10)->Arg(35)->Unit(benchmark::kMicrosecond);

void BM_Collective(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mixdisc::collective_error(kPair, n));
}
BENCHMARK(BM_Collective)->Arg(10)->Arg(25)->Arg(35)->Unit(benchmark::kMicrosecond);

void BM_Repeated(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mixdisc::repeated_error_opt(kPair, n));
}
BENCHMARK(BM_Repeated)->Arg(25)->Unit(benchmark::kMicrosecond);

void BM_Ppt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mixdisc::ppt_error(kPair, n));
}
BENCHMARK(BM_Ppt)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_DpSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const mixdisc::PriorGrid grid(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(mixdisc::dp_solve(kPair, n, grid));
}
BENCHMARK(BM_DpSolve)->Args({10, 2000})->Args({10, 20000})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
