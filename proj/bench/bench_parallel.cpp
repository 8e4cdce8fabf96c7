// Serial reference path against the OpenMP path for the three parallel kernels.

#include "phaselab/landscape.hpp"
#include "phaselab/monte_carlo.hpp"
#include "phaselab/sgd.hpp"

#include <benchmark/benchmark.h>

using namespace phaselab;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& state) {
    state.SetLabel(state.range(0) == 0 ? "serial" : "omp x" + std::to_string(thread_count()));
}

void BM_FourthMoment(benchmark::State& state) {
    const int n = 64;
    const auto spec = CirculantSpectrum::identity(n);
    const auto plant = PlantSpec::sine(1.2, 6);
    const DftBasis basis(n);
    const auto u = basis.cosine(6);
    for (auto _ : state) {
        auto acc = monte_carlo(spec, plant, 200'000, 7, exec_of(state), MeanAccumulator{},
                               [&](FourierSampler& s, RngStream& rng, std::vector<double>& x, MeanAccumulator& a) {
                                   s.sample_planted(rng, x);
                                   const double p = dot(u, x);
                                   a.add(p * p * p * p);
                               });
        benchmark::DoNotOptimize(acc.mean());
    }
    state.SetItemsProcessed(state.iterations() * 200'000);
    label(state);
}

void BM_LandscapeCells(benchmark::State& state) {
    const int n = 64;
    const auto sigma = Activation::hermite4();
    auto land = empirical_landscape(CirculantSpectrum::identity(n), PlantSpec::sine(1.2, 6), sigma, 21, 20'000, 8);
    for (auto _ : state) {
        evaluate_cells(land, sigma, exec_of(state));
        benchmark::DoNotOptimize(land.cells.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(land.cells.size()));
    label(state);
}

void BM_SeedSweep(benchmark::State& state) {
    const int n = 32;
    SgdConfig cfg;
    cfg.steps = 20'000;
    for (auto _ : state) {
        auto traces = run_seeds(CirculantSpectrum::identity(n), PlantSpec::sine(1.2, 4), Activation::hermite4(), cfg, 9,
                                8, exec_of(state));
        benchmark::DoNotOptimize(traces.data());
    }
    state.SetItemsProcessed(state.iterations() * 8 * cfg.steps);
    label(state);
}

}  // namespace

BENCHMARK(BM_FourthMoment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LandscapeCells)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeedSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
