#include "yahil/certify.hpp"
#include "yahil/shoot.hpp"

#include <benchmark/benchmark.h>

namespace {

std::vector<double> sweep_grid(yahil::PolytropicIndex g, int n)
{
    const auto w = yahil::sonic_window(g);
    std::vector<double> ys(n);
    for (int i = 0; i < n; ++i)
        ys[i] = w.y_f + (w.y_F - w.y_f) * (i + 0.5) / n;
    return ys;
}

void BM_SweepSerial(benchmark::State& state)
{
    const yahil::PolytropicIndex g(1.2);
    const auto ys = sweep_grid(g, 33);
    for (auto _ : state)
        benchmark::DoNotOptimize(yahil::classify_sweep_serial(ys, g));
}

void BM_SweepParallel(benchmark::State& state)
{
    const yahil::PolytropicIndex g(1.2);
    const auto ys = sweep_grid(g, 33);
    for (auto _ : state)
        benchmark::DoNotOptimize(yahil::classify_sweep(ys, g));
}

void BM_SuiteSerial(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(yahil::run_suite_serial());
}

void BM_SuiteParallel(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(yahil::run_suite());
}

} // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SuiteSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SuiteParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
