#include <benchmark/benchmark.h>

#include <vector>

#include "hierlag/ar_core.hpp"
#include "hierlag/design.hpp"
#include "hierlag/hiergroup.hpp"
#include "hierlag/pipeline.hpp"
#include "hierlag/rng.hpp"
#include "hierlag/solver.hpp"

using namespace hierlag;

namespace {

MultiSeriesDataset ar2_data(std::size_t M, std::size_t n) {
    std::vector<std::vector<double>> series;
    for (std::size_t m = 0; m < M; ++m) {
        series.push_back(simulate_ar(ARProcessSpec({0.5, -0.3}, 1.0), n, 500, splitmix64(m)).values);
    }
    return MultiSeriesDataset::from_series(std::move(series));
}

} // namespace

static void BM_ProxHier(benchmark::State& state) {
    const auto M = static_cast<std::size_t>(state.range(0));
    const auto L = static_cast<std::size_t>(state.range(1));
    const HierGroupStructure s(M, L);
    Rng rng(1);
    CoefVector v(static_cast<Eigen::Index>(M * L));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
    CoefVector work = v;
    for (auto _ : state) {
        work = v;
        prox_hier_inplace(s, work, 0.3);
        benchmark::DoNotOptimize(work.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(M * L));
}
BENCHMARK(BM_ProxHier)->Args({1, 10})->Args({8, 20})->Args({32, 50});

static void BM_GroupNorm(benchmark::State& state) {
    const HierGroupStructure s(8, 20);
    Rng rng(2);
    CoefVector v(160);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
    for (auto _ : state) benchmark::DoNotOptimize(group_norm(s, v));
}
BENCHMARK(BM_GroupNorm);

static void BM_BuildDesign(benchmark::State& state) {
    const auto data = ar2_data(8, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto d = build_design(data, 10);
        benchmark::DoNotOptimize(d.rows());
    }
}
BENCHMARK(BM_BuildDesign)->Arg(500)->Arg(5000);

static void BM_ApplyTranspose(benchmark::State& state) {
    const auto d = build_design(ar2_data(8, 2000), 10);
    const Eigen::VectorXd y = d.y();
    for (auto _ : state) benchmark::DoNotOptimize(d.apply_transpose(y).data());
}
BENCHMARK(BM_ApplyTranspose);

static void BM_GramOperatorNorm(benchmark::State& state) {
    const auto d = build_design(ar2_data(8, 2000), 10);
    for (auto _ : state) benchmark::DoNotOptimize(gram_operator_norm(d));
}
BENCHMARK(BM_GramOperatorNorm);

static void BM_Fit(benchmark::State& state) {
    const auto M = static_cast<std::size_t>(state.range(0));
    const auto d = build_design(ar2_data(M, 1000), 10);
    const HierGroupStructure s(M, 10);
    const double lambda = 0.05 * lambda_max(d);
    SolverConfig cfg;
    cfg.acceleration = state.range(1) == 0 ? Acceleration::Ista : Acceleration::FistaMonotone;
    for (auto _ : state) {
        const auto r = fit(d, s, lambda, cfg);
        state.counters["iters"] = r.trace.iters_used;
        benchmark::DoNotOptimize(r.beta.data());
    }
}
BENCHMARK(BM_Fit)->Args({4, 0})->Args({4, 1})->Args({16, 1})->Unit(benchmark::kMillisecond);

static void BM_CrossValidate(benchmark::State& state) {
    const auto d = build_design(ar2_data(8, 400), 9);
    const CrossValidationConfig cv;
    for (auto _ : state) {
        const auto r = cross_validate_lambda(d, cv, SolverConfig{}, PoolingMode::Identical);
        benchmark::DoNotOptimize(r.chosen_index);
    }
}
BENCHMARK(BM_CrossValidate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
