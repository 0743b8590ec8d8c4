#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "pslab/cohort.hpp"
#include "pslab/rng.hpp"

using namespace pslab;

static void SampleCovariates(benchmark::State& state) {
    const auto corr = bench::default_correlation();
    const int n = static_cast<int>(state.range(0));
    std::uint64_t i = 0;
    for (auto _ : state) {
        auto stream = RngStream::from_seed(1, stream_purpose::covariates, i++);
        auto w = sample_covariates(n, corr, stream);
        benchmark::DoNotOptimize(w);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(SampleCovariates)->Arg(1000)->Arg(20000);

static void GenerateCohort(benchmark::State& state) {
    const auto spec =
        make_scenario(static_cast<char>(state.range(0)), bench::default_coefficients(),
                      bench::default_correlation(), 20000);
    std::uint64_t i = 0;
    for (auto _ : state) {
        auto cohort = generate_cohort(spec, 1, i++);
        benchmark::DoNotOptimize(cohort);
    }
    state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(GenerateCohort)->Arg('A')->Arg('G');
