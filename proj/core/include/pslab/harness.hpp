#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pslab/cohort.hpp"
#include "pslab/effect.hpp"
#include "pslab/glm.hpp"
#include "pslab/ps_methods.hpp"
#include "pslab/scenario.hpp"

namespace pslab {

enum class Method {
    psm,
    ipw,
    ipw_trunc,
    ipw_stab,
    ipw_trunc_stab,
    pss_quantile,
    pss_value,
};

inline constexpr std::array<Method, 7> kAllMethods = {
    Method::psm,           Method::ipw,          Method::ipw_trunc, Method::ipw_stab,
    Method::ipw_trunc_stab, Method::pss_quantile, Method::pss_value,
};

// Stable identifier used in files and on the command line ("IPW-trunc-stab").
const std::string& method_key(Method m);
// Table heading ("IPW (trunc & stab)").
const std::string& method_display_name(Method m);
// Case-insensitive lookup by key; nullopt when unknown.
std::optional<Method> parse_method_key(std::string_view key);

struct ExperimentConfig {
    std::vector<char> scenarios = {'A'};
    int n = 20000;
    int reps = 1000;
    double subsample_fraction = 0.7;
    std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
    DesignSpec ps_model = DesignSpec::main_effects(10);
    std::uint64_t master_seed = 0;
    CoefficientSet coefficients;
    CorrelationMatrix correlation;
    double truncation_percentile = 0.01;
    int strata = 5;
    double caliper_multiplier = 0.1;
    int threads = 1;
    // false (default): one base cohort per scenario, resampled every
    // replicate. true: an independent cohort per replicate.
    bool fresh_cohort_per_replicate = false;
    int oracle_reps = 50;

    void validate() const;  // throws ConfigError
};

struct MethodResult {
    Method method = Method::psm;
    bool ok = false;
    EffectEstimate estimate;  // meaningful iff ok
    std::string error;        // failure reason iff !ok
};

// One subsample replicate: draws floor(fraction*n) subjects without
// replacement from a stream keyed on (master_seed, replicate_index), fits
// the PS model once, applies every configured method to that PS vector.
// Per-method failures are recorded, never thrown.
std::vector<MethodResult> run_replicate(const Cohort& cohort, const ExperimentConfig& config,
                                        std::uint64_t replicate_index);

struct MethodSummary {
    Method method = Method::psm;
    int replicates_ok = 0;
    int replicates_failed = 0;
    // over successful replicates; NaN when none succeeded
    double mean_estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool high_failure_warning = false;  // > 5% of replicates failed
};

struct ScenarioSummary {
    char label = 'A';
    TruthReport oracle;
    std::vector<MethodSummary> methods;  // config order
};

struct ExperimentSummary {
    ExperimentConfig config;
    std::vector<ScenarioSummary> scenarios;
    bool high_failure_warning = false;  // any cell flagged
};

struct AggregateStats {
    double mean = 0.0;
    double ci_low = 0.0;   // empirical 2.5th percentile
    double ci_high = 0.0;  // empirical 97.5th percentile
};

// Mean and empirical 95% interval of a replicate-estimate list.
AggregateStats aggregate_estimates(std::vector<double> estimates);

// Runs every scenario: base cohort, `reps` replicates (parallelized, results
// independent of thread count), per-method aggregation, counterfactual
// oracle.
ExperimentSummary run_experiment(const ExperimentConfig& config);

// Reproduction manifest: artifact version plus the full resolved config.
std::string config_manifest_json(const ExperimentConfig& config);

std::string to_json(const ExperimentSummary& summary);
// One row per scenario x method.
std::string to_csv(const ExperimentSummary& summary);
// Methods as rows, scenarios as columns, "mean [lo, hi]" cells.
std::string to_markdown(const ExperimentSummary& summary);
// Plot-ready long format: scenario,method,display_name,mean,ci_low,ci_high.
std::string plot_data_csv(const ExperimentSummary& summary);

}  // namespace pslab
