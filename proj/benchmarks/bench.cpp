#include <benchmark/benchmark.h>

#include <vector>

#include "diagline/enumerate.hpp"
#include "diagline/expsum.hpp"
#include "diagline/instance.hpp"
#include "diagline/localdensity.hpp"
#include "diagline/realdensity.hpp"

using namespace diagline;

static void BM_FlagshipCount(benchmark::State& st) {
  const auto fl = flagship_instance().line_system();
  CountOptions opt;
  opt.threads = 1;
  for (auto _ : st) benchmark::DoNotOptimize(count_lines_mitm(fl, st.range(0), opt).count);
}
BENCHMARK(BM_FlagshipCount)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

static void BM_CountMod(benchmark::State& st) {
  const auto fl = flagship_instance().line_system();
  for (auto _ : st) benchmark::DoNotOptimize(count_mod(fl, st.range(0), 2));
}
BENCHMARK(BM_CountMod)->Arg(2)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_WeylSum(benchmark::State& st) {
  const std::vector<double> alpha = {0.1234, 0.5678, 0.9012};
  for (auto _ : st) benchmark::DoNotOptimize(weyl_sum(alpha, st.range(0)));
}
BENCHMARK(BM_WeylSum)->Range(100, 100000);

static void BM_Slab(benchmark::State& st) {
  const auto fl = flagship_instance().line_system();
  SlabSampler sm;
  sm.samples = static_cast<std::uint64_t>(st.range(0));
  sm.threads = 1;
  for (auto _ : st) benchmark::DoNotOptimize(slab_volume(fl, 0.1, sm).value);
}
BENCHMARK(BM_Slab)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
