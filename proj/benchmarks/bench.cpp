#include <benchmark/benchmark.h>

#include "epbeam/sweep.hpp"

using namespace epbeam;

namespace {

ComplexMatrix seeded_matrix(int dim, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = rng.complex_in_square();
    return m;
}

void BM_expm(benchmark::State& state) {
    const ComplexMatrix m = seeded_matrix(static_cast<int>(state.range(0)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(expm(m));
}
BENCHMARK(BM_expm)->Arg(7)->Arg(16)->Arg(32);

void BM_eig(benchmark::State& state) {
    const ComplexMatrix m = seeded_matrix(static_cast<int>(state.range(0)), 11);
    for (auto _ : state) benchmark::DoNotOptimize(eig(m));
}
BENCHMARK(BM_eig)->Arg(5)->Arg(7)->Arg(16)->Arg(32);

void BM_numeric_spectrum(benchmark::State& state) {
    const ModelParams p{1.0, 1.0, 0.8, 1.1, static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(numeric_spectrum(p));
}
BENCHMARK(BM_numeric_spectrum)->Arg(4)->Arg(6);

void BM_propagator_wei_norman(benchmark::State& state) {
    const ModelParams p{1.0, 1.0, 0.5, 1.3, static_cast<int>(state.range(0))};
    for (auto _ : state)
        benchmark::DoNotOptimize(propagator(p, 3.7, Backend::wei_norman));
}
BENCHMARK(BM_propagator_wei_norman)->Arg(4)->Arg(6);

void BM_propagator_expm(benchmark::State& state) {
    const ModelParams p{1.0, 1.0, 0.5, 1.3, static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(propagator(p, 3.7, Backend::expm));
}
BENCHMARK(BM_propagator_expm)->Arg(4)->Arg(6);

void BM_evolve(benchmark::State& state) {
    const ModelParams p{1.0, 1.0, 0.0, 0.5, 4};
    std::vector<double> zs;
    for (int i = 0; i <= 400; ++i) zs.push_back(i * 0.025);
    const ComplexVector psi = noon_state(4);
    for (auto _ : state) benchmark::DoNotOptimize(evolve(p, psi, zs));
}
BENCHMARK(BM_evolve);

void BM_gamma_sweep(benchmark::State& state) {
    SweepSpec spec;
    spec.base = ModelParams{1.0, 1.0, 0.8, 0.0, 4};
    spec.axis = SweepAxis::gamma;
    spec.min = 0.0;
    spec.max = 4.0;
    spec.steps = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_gamma_sweep(spec));
}
BENCHMARK(BM_gamma_sweep)->Arg(101)->Arg(401);

}  // namespace

BENCHMARK_MAIN();
