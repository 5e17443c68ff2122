// Serial reference against the OpenMP path for the data-parallel kernels.
// Arg 0 runs Exec::serial(), arg 1 runs Exec::openmp() with all threads.

#include <benchmark/benchmark.h>

#include "livsic/sections.hpp"

using namespace livsic;

namespace {

std::shared_ptr<const HyperbolicBase> cat() {
  static auto b = std::make_shared<const HyperbolicBase>(CatMap({{{2, 1}, {1, 1}}}));
  return b;
}

SkewSystem coboundary() {
  BumpField v;
  v.a = {0.2, {{0.1, 1, 0, 0.3}, {0.05, 0, 1, 1.1}}, {}};
  v.b = {0.1, {{0.07, 1, 1, 0.2}}, {}};
  v.c = {0.3, {{0.04, 0, 1, 0.0}}, {}};
  return make_skew(cat(), CircleCocycle::coboundary(cat(), v));
}

Exec exec_for(const benchmark::State& state) { return state.range(0) ? Exec::openmp() : Exec::serial(); }

void BM_poo_check(benchmark::State& state) {
  const auto s = coboundary();
  for (auto _ : state) benchmark::DoNotOptimize(poo_check(s, 5, 1e-4, exec_for(state), 256).worst_defect);
}

void BM_exponent_sweep(benchmark::State& state) {
  const auto s = coboundary();
  for (auto _ : state) benchmark::DoNotOptimize(exponent_sweep(s, 4, 8, 5000, 1, exec_for(state)).envelope_max);
}

void BM_domination(benchmark::State& state) {
  const auto s = coboundary();
  DominationGrid g;
  g.base_resolution = 16;
  g.fiber_samples = 64;
  for (auto _ : state) benchmark::DoNotOptimize(domination_test(s, 1, 8, g, exec_for(state)).margin);
}

void BM_solve_diffeo(benchmark::State& state) {
  const auto s = coboundary();
  const auto plan = cat()->transitive_point(cat()->grid(16), 3);
  SolveOptions o;
  o.fiber_samples = 256;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_diffeo(s, plan, CircleDiffeo::identity(256), o, exec_for(state)).report.residual_C0);
}

void BM_trivialize(benchmark::State& state) {
  const auto s = coboundary();
  const auto plan = cat()->transitive_point(cat()->grid(16), 5, true);
  const auto atlas = build_atlas(s, plan);
  for (auto _ : state) benchmark::DoNotOptimize(trivialize(s, atlas, 64, exec_for(state)).conjugacy_residual);
}

}  // namespace

BENCHMARK(BM_poo_check)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_exponent_sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_domination)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_solve_diffeo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_trivialize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
