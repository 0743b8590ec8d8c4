#include <benchmark/benchmark.h>

#include <map>

#include "bench_common.hpp"
#include "pslab/cohort.hpp"
#include "pslab/ps_methods.hpp"

using namespace pslab;

namespace {

struct Fixture {
    Cohort cohort;
    PSVector ps;
};

const Fixture& fixture(int n) {
    static std::map<int, Fixture> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        const auto spec =
            make_scenario('A', bench::default_coefficients(), bench::default_correlation(), n);
        Fixture f;
        f.cohort = generate_cohort(spec, 1, 0);
        f.ps = true_ps_vector(f.cohort);
        it = cache.emplace(n, std::move(f)).first;
    }
    return it->second;
}

}  // namespace

static void MatchNearest(benchmark::State& state) {
    const auto& f = fixture(static_cast<int>(state.range(0)));
    const double caliper = compute_caliper(f.ps, f.cohort.a);
    std::uint64_t i = 0;
    for (auto _ : state) {
        auto stream = RngStream::from_seed(1, stream_purpose::matching, i++);
        auto m = match_nearest(f.ps, f.cohort.a, caliper, stream);
        benchmark::DoNotOptimize(m);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(MatchNearest)->Arg(14000)->Arg(20000);

static void IpwWeights(benchmark::State& state) {
    const auto& f = fixture(20000);
    for (auto _ : state) {
        auto w = ipw_weights(f.ps, f.cohort.a, WeightVariant::truncated_stabilized);
        benchmark::DoNotOptimize(w);
    }
    state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(IpwWeights);

static void StratifyQuantile(benchmark::State& state) {
    const auto& f = fixture(20000);
    for (auto _ : state) {
        auto s = stratify(f.ps, StratifyMethod::quantile);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(StratifyQuantile);
