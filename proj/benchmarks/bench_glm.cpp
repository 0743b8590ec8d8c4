#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "pslab/cohort.hpp"
#include "pslab/glm.hpp"
#include "pslab/ps_methods.hpp"

using namespace pslab;

// the harness's hot loop: an 11-term logistic fit on a 70% subsample
static void FitMainEffects(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto spec =
        make_scenario('A', bench::default_coefficients(), bench::default_correlation(), n);
    const auto cohort = generate_cohort(spec, 1, 0);
    const auto design = DesignSpec::main_effects(10);
    for (auto _ : state) {
        auto fit = fit_logistic(design, cohort.view(), cohort.a);
        benchmark::DoNotOptimize(fit);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(FitMainEffects)->Arg(14000)->Arg(20000);

static void FitSaturatedDesign(benchmark::State& state) {
    const auto spec =
        make_scenario('G', bench::default_coefficients(), bench::default_correlation(), 20000);
    const auto cohort = generate_cohort(spec, 1, 0);
    const auto design = true_ps_design(spec);  // 21 terms
    for (auto _ : state) {
        auto fit = fit_logistic(design, cohort.view(), cohort.a);
        benchmark::DoNotOptimize(fit);
    }
    state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(FitSaturatedDesign);
