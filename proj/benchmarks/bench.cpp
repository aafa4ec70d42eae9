#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "defix/econometrics.hpp"
#include "defix/features.hpp"
#include "defix/index_engine.hpp"
#include "defix/market_data.hpp"
#include "defix/stats.hpp"
#include "synthetic.hpp"

namespace {

void BM_RunIndex(benchmark::State& state) {
    const auto panel = synth::turnover_panel(1, static_cast<std::size_t>(state.range(0)), 24, true);
    defix::IndexConfig config;
    config.target_count = 20;
    for (auto _ : state) benchmark::DoNotOptimize(defix::run_index(panel, {}, config));
    state.SetItemsProcessed(state.iterations() * 730);
}
BENCHMARK(BM_RunIndex)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Ols(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(0.0, 1.0);
    defix::DesignMatrix x;
    for (int j = 0; j < 4; ++j) {
        std::vector<double> c(n);
        for (auto& v : c) v = z(rng);
        x.add("x" + std::to_string(j), std::move(c));
    }
    std::vector<double> y(n);
    for (auto& v : y) v = z(rng);
    for (auto _ : state) benchmark::DoNotOptimize(defix::ols(y, x));
}
BENCHMARK(BM_Ols)->Arg(50)->Arg(1000)->Arg(10000);

void BM_PanelTimeEffects(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const auto panel = synth::random_panel(rng, static_cast<std::size_t>(state.range(0)), 100, 4,
                                           {0.1, 0.0, 0.0, 0.0}, 0.8);
    for (auto _ : state) benchmark::DoNotOptimize(defix::panel_ols_time_effects(panel));
    state.counters["rows"] = static_cast<double>(panel.rows.size());
}
BENCHMARK(BM_PanelTimeEffects)->Arg(15)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_SummaryStats(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z(0.0, 0.05);
    std::vector<double> x(static_cast<std::size_t>(state.range(0)));
    for (auto& v : x) v = z(rng);
    for (auto _ : state) benchmark::DoNotOptimize(defix::summary_stats(x, true));
}
BENCHMARK(BM_SummaryStats)->Arg(1826)->Arg(100000);

void BM_ResampleWeekly(benchmark::State& state) {
    defix::Series daily;
    for (int d = 0; d < 1826; ++d) {
        daily.push_back(defix::make_date(2017, 1, 1) + std::chrono::days(d), 0.001 * (d % 7));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(defix::resample(daily, defix::Frequency::weekly, defix::Aggregation::compound));
    }
}
BENCHMARK(BM_ResampleWeekly);

}  // namespace

BENCHMARK_MAIN();
