// Serial reference vs OpenMP for the three data-parallel kernels on case9.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <vector>

#include "bidgame/case_file.hpp"
#include "bidgame/experiments.hpp"
#include "bidgame/game.hpp"

using namespace bidgame;

namespace {

const CaseFile& case9()
{
    static const CaseFile c = load_case(BIDGAME_DATA_DIR "/case9.json");
    return c;
}

void candidates(benchmark::State& state, Backend backend)
{
    const CaseFile& c = case9();
    const std::vector<double> prices{2.7, 3.4, 4.1};
    const std::vector<double> grid = best_response_candidates(prices[1], c.game);
    for (auto _ : state) {
        auto v = backend == Backend::serial ? evaluate_candidates_serial(1, grid, prices, c.network, c.market)
                                            : evaluate_candidates_omp(1, grid, prices, c.network, c.market);
        benchmark::DoNotOptimize(v);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}

void quiver(benchmark::State& state, Backend backend)
{
    const CaseFile& c = case9();
    GameConfig config = c.game;
    config.mode = PlayMode::better_response;
    const QuiverGrid grid{0.5, 5.0, 0.25, 0.5, 5.0, 0.25};
    const std::vector<double> base{2.0, 2.0, 5.0};
    for (auto _ : state) {
        auto v = quiver_field(grid, base, 0, 1, c.network, c.market, config, backend);
        benchmark::DoNotOptimize(v);
    }
}

void sweep_grid(benchmark::State& state, Backend backend)
{
    const CaseFile& c = case9();
    SweepSpec spec;
    spec.axes = {parse_axis("2.5:4.5:1"), parse_axis("2.5:4.5:1"), parse_axis("2.5:4.5:1")};
    spec.frozen = {std::nullopt, std::nullopt, std::nullopt};
    spec.max_rounds = 10;
    for (auto _ : state) {
        auto v = sweep(c, spec, backend);
        benchmark::DoNotOptimize(v);
    }
}

}  // namespace

BENCHMARK_CAPTURE(candidates, serial, Backend::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(candidates, openmp, Backend::openmp)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(quiver, serial, Backend::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(quiver, openmp, Backend::openmp)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sweep_grid, serial, Backend::serial)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK_CAPTURE(sweep_grid, openmp, Backend::openmp)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
