// Serial reference kernels against the OpenMP ones.
// Run: bench_kernels [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fixtures.hpp"
#include "motionfit/kernels.hpp"

using namespace motionfit;

namespace {

const CommitmentModel& model() { return fixtures::synthetic_model(); }

std::vector<double> queries(std::size_t n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uxy(-30, 30), uv(0, 7), ut(0.5, 4);
    std::vector<double> q;
    for (std::size_t i = 0; i < n; ++i) q.insert(q.end(), {uxy(rng), uxy(rng), uv(rng), ut(rng)});
    return q;
}

void BM_density_reference(benchmark::State& state) {
    const auto q = queries(static_cast<std::size_t>(state.range(0)));
    std::vector<double> out(q.size() / 4);
    for (auto _ : state) {
        kernels::reference::kde_density(model().f0, q, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_density_omp(benchmark::State& state) {
    const auto q = queries(static_cast<std::size_t>(state.range(0)));
    std::vector<double> out(q.size() / 4);
    for (auto _ : state) {
        kernels::omp::kde_density(model().f0, q, out, Workers{static_cast<int>(state.range(1))});
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void influence(benchmark::State& state, bool parallel) {
    const Pitch pitch;
    const GridSpec grid = pitch.grid(2.0);
    const auto mask = pitch.mask(grid);
    const auto p = fixtures::player("p", "home", {10, -5}, {1, 0.5}, 4.0);
    std::vector<double> out(grid.size());
    for (auto _ : state) {
        if (parallel) {
            kernels::omp::player_influence(model(), p, {0, 0}, grid, mask, {}, out,
                                           Workers{static_cast<int>(state.range(0))});
        } else {
            kernels::reference::player_influence(model(), p, {0, 0}, grid, mask, {}, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

void BM_influence_reference(benchmark::State& state) { influence(state, false); }
void BM_influence_omp(benchmark::State& state) { influence(state, true); }

}  // namespace

BENCHMARK(BM_density_reference)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_density_omp)->Args({2000, 1})->Args({2000, 0})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_influence_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_influence_omp)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
