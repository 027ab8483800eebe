#include <benchmark/benchmark.h>

#include "chirpsep/chirpsep.hpp"
#include "chirpsep/rng.hpp"

namespace {

using namespace chirpsep;

Scenario bench_scenario() {
  Scenario s;
  s.label = "bench";
  s.horizon = 1e-4;
  s.sample_rate = 5e8;
  s.trains = {
      {1.0, 1.08e9, 1.5e7, 3e-5, 1e-5, 5e-5, 2},
      {1.0, 1.36e9, 5e6, 1e-5, 1e-5, 1.5e-5, 5},
      {1.0, 1.51e9, 2e7, 7e-5, 1.5e-5, 0.0, 1},
  };
  return s;
}

void BM_synthesize(benchmark::State& state) {
  const Scenario s = bench_scenario();
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize(s));
  }
}
BENCHMARK(BM_synthesize)->Unit(benchmark::kMillisecond);

void BM_add_noise(benchmark::State& state) {
  const IQRecord clean = synthesize(bench_scenario());
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(add_noise(clean, {-10.0, ++seed}));
  }
}
BENCHMARK(BM_add_noise)->Unit(benchmark::kMillisecond);

void BM_snippet_spectrum(benchmark::State& state) {
  const IQRecord record = add_noise(synthesize(bench_scenario()), {-10.0, 1});
  const SnippetPlan plan = SnippetPlan::uniform(record, 2e-6, 100);
  const KernelSpec kernel = KernelSpec::make(plan.n);
  int k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        snippet_spectrum(record, plan.centers[static_cast<std::size_t>(k)], plan, kernel));
    k = (k + 1) % plan.count;
  }
}
BENCHMARK(BM_snippet_spectrum)->Unit(benchmark::kMicrosecond);

void BM_build_diagram(benchmark::State& state) {
  const IQRecord record = add_noise(synthesize(bench_scenario()), {-10.0, 1});
  const SnippetPlan plan =
      SnippetPlan::uniform(record, 2e-6, static_cast<int>(state.range(0)), 99.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_diagram(record, plan, 8e6));
  }
}
BENCHMARK(BM_build_diagram)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_dbscan(benchmark::State& state) {
  GaussianStream g(42);
  const int n = static_cast<int>(state.range(0));
  std::vector<std::array<double, 2>> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) p = {g.next(), g.next()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(dbscan(pts, 0.05, 5));
  }
}
BENCHMARK(BM_dbscan)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_pipeline(benchmark::State& state) {
  const IQRecord record = add_noise(synthesize(bench_scenario()), {-10.0, 1});
  const SnippetPlan plan = SnippetPlan::uniform(record, 2e-6, 500, 99.7);
  PipelineConfig cfg;
  cfg.b_rec = 7e8;
  cfg.eta = 8e6;
  cfg.d2 = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_pipeline(record, plan, cfg));
  }
}
BENCHMARK(BM_pipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
