#include <benchmark/benchmark.h>

#include "rofp/baseline.hpp"
#include "rofp/detector.hpp"
#include "rofp/rng.hpp"
#include "rofp/simulator.hpp"
#include "rofp/ulsif.hpp"

using namespace rofp;

namespace {

ulsif::Samples gaussian_samples(std::uint64_t seed, std::size_t n, double mean) {
    Rng rng(seed);
    ulsif::Samples s;
    s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.push_back(rng.normal(mean, 1.0));
    return s;
}

fingerprint::DeviceLayout column_layout(int rows) {
    fingerprint::DeviceLayout layout;
    layout.rows = rows;
    layout.column_groups = {{0, 1}};
    layout.lut_inputs = 1;
    return layout;
}

} // namespace

static void BM_SelectModel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto inlier = gaussian_samples(1, n, 0.0);
    const auto test = gaussian_samples(2, n, 0.2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ulsif::select_model(inlier, test));
    }
}
BENCHMARK(BM_SelectModel)->Arg(32)->Arg(94)->Arg(256);

static void BM_GramStats(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto inlier = gaussian_samples(3, n, 0.0);
    const auto test = gaussian_samples(4, n, 0.0);
    const ulsif::KernelSpec kernel{0.5, ulsif::select_centers(test)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(ulsif::compute_gram_stats(inlier, test, kernel));
    }
}
BENCHMARK(BM_GramStats)->Arg(94)->Arg(512);

static void BM_ScorePair(benchmark::State& state) {
    const auto layout = column_layout(static_cast<int>(state.range(0)));
    sim::VariationModel vm;
    vm.systematic = {0.03, -0.02, 0.0001, 0.00001, -0.000201};
    vm.random_sigma = 0.08;
    const auto fp = sim::generate_fresh(layout, vm, 7, "bench");
    for (auto _ : state) {
        benchmark::DoNotOptimize(detector::score_pair(fp, 0, {0, 1}));
    }
}
BENCHMARK(BM_ScorePair)->Arg(94);

static void BM_Silhouette(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(9);
    std::vector<double> points;
    std::vector<int> assignments;
    for (std::size_t i = 0; i < n; ++i) {
        points.push_back(rng.normal(i % 2 == 0 ? 0.0 : 8.0, 1.0));
        assignments.push_back(static_cast<int>(i % 2));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(baseline::mean_silhouette(points, assignments, 2));
    }
}
BENCHMARK(BM_Silhouette)->Arg(1000)->Arg(42112);

static void BM_KmeansPP(benchmark::State& state) {
    Rng rng(10);
    std::vector<double> points;
    for (int i = 0; i < state.range(0); ++i) points.push_back(rng.normal((i % 2) * 10.0, 1.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(baseline::kmeanspp(points, 2, 11));
    }
}
BENCHMARK(BM_KmeansPP)->Arg(8480)->Arg(42112);

static void BM_GenerateFresh(benchmark::State& state) {
    fingerprint::DeviceLayout layout;
    layout.rows = 94;
    layout.column_groups = {{0, 3}, {4, 7}, {8, 10}, {11, 13}};
    layout.lut_inputs = 6;
    sim::VariationModel vm;
    vm.systematic = {0.03, -0.02, 0.0001, 0.00001, -0.000201};
    vm.random_sigma = 0.08;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim::generate_fresh(layout, vm, 13, "bench"));
    }
}
BENCHMARK(BM_GenerateFresh);

BENCHMARK_MAIN();
