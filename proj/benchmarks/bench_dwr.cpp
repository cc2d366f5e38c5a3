#include "stdwr/adaptivity.hpp"
#include "stdwr/dual_solver.hpp"
#include "stdwr/estimator.hpp"
#include "stdwr/primal_solver.hpp"

#include <benchmark/benchmark.h>

using namespace stdwr;

namespace {

SpaceTimeMesh grid(benchmark::State& state, double T)
{
    const auto n = static_cast<int>(state.range(0));
    return SpaceTimeMesh::uniform(Rectangle::unit_square(), n, n, T, 8);
}

void BM_PrimalSweep(benchmark::State& state)
{
    const auto data = make_problem(Preset::MovingHump, 1e-3);
    const auto mesh = grid(state, 0.5);
    for (auto _ : state) {
        AssemblyContext ctx(data, 1.0, QuadratureConfig::for_degrees(1, 0, 2, 0));
        benchmark::DoNotOptimize(solve_primal(ctx, mesh, 1, 0));
    }
}
BENCHMARK(BM_PrimalSweep)->RangeMultiplier(2)->Range(8, 32)->Unit(benchmark::kMillisecond);

void BM_DualSweep(benchmark::State& state)
{
    const auto data = make_problem(Preset::MovingHump, 1e-3);
    const auto mesh = grid(state, 0.5);
    AssemblyContext ctx(data, 1.0, QuadratureConfig::for_degrees(1, 0, 2, 0));
    const auto u = solve_primal(ctx, mesh, 1, 0);
    const GoalFunctional goal(GoalKind::FinalTime, ctx, u);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_dual(ctx, mesh, 2, 0, goal));
    }
}
BENCHMARK(BM_DualSweep)->RangeMultiplier(2)->Range(8, 32)->Unit(benchmark::kMillisecond);

void BM_Estimate(benchmark::State& state)
{
    const auto data = make_problem(Preset::RotatingHill, 1.0);
    const auto mesh = grid(state, 1.0);
    const auto mode = static_cast<TemporalMode>(state.range(1));
    const int s = mode == TemporalMode::hoFE ? 1 : 0;
    AssemblyContext ctx(data, 0.0, QuadratureConfig::for_degrees(1, 0, 2, s));
    const auto u = solve_primal(ctx, mesh, 1, 0);
    const GoalFunctional goal(GoalKind::L2L2, ctx, u);
    const auto z = solve_dual(ctx, mesh, 2, s, goal);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate(ctx, u, z, mode));
    }
}
BENCHMARK(BM_Estimate)
    ->ArgsProduct({{8, 16}, {static_cast<long>(TemporalMode::hoRe), static_cast<long>(TemporalMode::hoFE)}})
    ->Unit(benchmark::kMillisecond);

void BM_Mark(benchmark::State& state)
{
    std::vector<double> eta(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < eta.size(); ++i) {
        eta[i] = static_cast<double>((i * 2654435761u) % 1000u) - 500.0;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(mark(eta, 0.3));
    }
}
BENCHMARK(BM_Mark)->Range(1 << 8, 1 << 16);

}  // namespace

BENCHMARK_MAIN();
