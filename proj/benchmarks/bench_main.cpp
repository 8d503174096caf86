#include <benchmark/benchmark.h>

#include "rsmoment/moments.hpp"
#include "rsmoment/tracefmla.hpp"

using namespace rsm;

static void BM_Eigenforms(benchmark::State& state) {
  const auto M = size_t(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eigenforms(24, M));
  state.SetItemsProcessed(state.iterations() * int64_t(M));
}
BENCHMARK(BM_Eigenforms)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_BesselJ(benchmark::State& state) {
  const int order = int(state.range(0));
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_j(order, x));
    x = x < 200 ? x * 1.01 : 0.1;
  }
}
BENCHMARK(BM_BesselJ)->Arg(11)->Arg(39);

static void BM_VTable(benchmark::State& state) {
  VFunction V(VParams::degree_one(int(state.range(0)), 12));
  const size_t M = effective_cutoff(V, 1e-10);
  for (auto _ : state) benchmark::DoNotOptimize(make_v_table(V, M));
  state.counters["M"] = double(M);
}
BENCHMARK(BM_VTable)->Arg(16)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_KloostermanTable(benchmark::State& state) {
  const long c = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(KloostermanTable(1, c));
}
BENCHMARK(BM_KloostermanTable)->Arg(97)->Arg(1000)->Arg(4096);

static void BM_ETerm(benchmark::State& state) {
  static const NewformRecord g = newform_from_eigenform(eigenforms(12, 100000)[0]);
  MomentEngine e(g, int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(e.e_term(2));
}
BENCHMARK(BM_ETerm)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
