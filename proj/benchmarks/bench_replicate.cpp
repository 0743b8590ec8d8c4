#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "pslab/harness.hpp"

using namespace pslab;

// end-to-end cost of one replicate: subsample, PS fit, all seven methods
static void RunReplicate(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.scenarios = {static_cast<char>(state.range(0))};
    cfg.n = 20000;
    cfg.reps = 1;
    cfg.subsample_fraction = 0.7;
    cfg.coefficients = bench::default_coefficients();
    cfg.correlation = bench::default_correlation();
    cfg.master_seed = 1;
    const auto spec = make_scenario(static_cast<char>(state.range(0)), cfg.coefficients,
                                    cfg.correlation, cfg.n);
    const auto cohort = generate_cohort(spec, cfg.master_seed, 0);
    int r = 0;
    for (auto _ : state) {
        auto results = run_replicate(cohort, cfg, r++);
        benchmark::DoNotOptimize(results);
    }
    state.SetItemsProcessed(state.iterations() * cfg.n);
}
BENCHMARK(RunReplicate)->Arg('A')->Arg('G')->Unit(benchmark::kMillisecond);
