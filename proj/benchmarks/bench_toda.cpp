#include <benchmark/benchmark.h>

#include "toda/thermo.hpp"
#include "toda/toda.hpp"

using namespace toda;

namespace {

GridPtr disc(benchmark::State& state) { return build_grid(GridMode::cartesian, static_cast<int>(state.range(0)), 0.9); }

void BM_Laplacian(benchmark::State& state) {
  const GridPtr g = disc(state);
  const Field f = model_fields(g, 2).front();
  for (auto _ : state) benchmark::DoNotOptimize(laplacian(f));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g->size()));
}
BENCHMARK(BM_Laplacian)->Arg(129)->Arg(257)->Arg(513);

void BM_Residual(benchmark::State& state) {
  const GridPtr g = disc(state);
  const auto w = model_fields(g, 4);
  const Field q = evaluate_density(polynomial_weight(4, {0.0, 1.0}), g);
  for (auto _ : state) benchmark::DoNotOptimize(toda_residual(w, q));
}
BENCHMARK(BM_Residual)->Arg(129)->Arg(257);

void BM_JacobianAssembly(benchmark::State& state) {
  const GridPtr g = disc(state);
  const auto w = model_fields(g, 4);
  const Field q = evaluate_density(polynomial_weight(4, {0.0, 1.0}), g);
  for (auto _ : state) benchmark::DoNotOptimize(toda_jacobian(w, q).matrix().nonZeros());
}
BENCHMARK(BM_JacobianAssembly)->Arg(129)->Arg(257);

void BM_Solve(benchmark::State& state) {
  const GridPtr g = disc(state);
  const WeightDensity q = polynomial_weight(3, {0.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(solve_toda(q, g).residual_sup);
}
BENCHMARK(BM_Solve)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

void BM_Thermo(benchmark::State& state) {
  const GridPtr g = disc(state);
  const TodaSolution sol = make_solution(zero_weight(4), g, BoundaryStrategy::model_poincare, model_fields(g, 4));
  for (auto _ : state) benchmark::DoNotOptimize(compute_thermo(sol, 1.0, Reference::flat).lower_redundancy);
}
BENCHMARK(BM_Thermo)->Arg(129);

}  // namespace

BENCHMARK_MAIN();
