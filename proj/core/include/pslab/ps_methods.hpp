#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pslab/cohort.hpp"
#include "pslab/glm.hpp"
#include "pslab/rng.hpp"

namespace pslab {

enum class PsSource { estimated, truth };

struct PSVector {
    std::vector<double> values;  // strictly inside (0,1)
    PsSource source = PsSource::estimated;
};

struct MatchedPair {
    int treated;
    int control;
};

// 1:1 matches without replacement; every |PS_t - PS_c| <= caliper_width.
struct MatchedSet {
    std::vector<MatchedPair> pairs;
    double caliper_width = 0.0;
};

enum class WeightVariant { plain, truncated, stabilized, truncated_stabilized };

struct WeightVector {
    std::vector<double> values;  // finite, > 0
    WeightVariant variant = WeightVariant::plain;
    std::optional<double> truncation_percentile;  // set iff variant clamps
    double clamp_low = 0.0;   // bounds applied when clamping; valid iff
    double clamp_high = 0.0;  // truncation_percentile is set
};

enum class StratifyMethod { quantile, ps_value };

struct StratumAssignment {
    std::vector<int> stratum_of;     // labels 1..k
    StratifyMethod method = StratifyMethod::quantile;
    int k = 5;
    std::vector<double> boundaries;  // k+1, ascending
    bool degenerate = false;         // all PS identical under ps_value
};

// Fit a logistic model of treatment on the given terms and return the fitted
// probabilities. The model must not contain the treatment itself.
PSVector estimate_ps(const Cohort& cohort, const DesignSpec& model,
                     const FitOptions& options = {});

// The design matching the scenario's data-generating treatment model:
// intercept, W1..W7 main effects, and the scenario's quadratic and
// interaction terms (each with a free coefficient).
DesignSpec true_ps_design(const ScenarioSpec& spec);

PSVector true_ps_vector(const Cohort& cohort);

// multiplier times the pooled standard deviation of the PS across arms:
// sqrt(((n1-1)s1^2 + (n0-1)s0^2) / (n1+n0-2)). Needs >= 2 subjects per arm.
double compute_caliper(const PSVector& ps, std::span<const std::uint8_t> a,
                       double multiplier = 0.1);

// Greedy 1:1 nearest-neighbor matching without replacement. Treated subjects
// are visited in a seeded random order; each takes the unmatched control with
// the smallest |PS difference|, or goes unmatched when that difference
// exceeds the caliper. Distance ties go to the lowest control index.
MatchedSet match_nearest(const PSVector& ps, std::span<const std::uint8_t> a,
                         double caliper, RngStream& stream);

// Inverse-probability-of-treatment weights. Plain: 1/ps for the treated,
// 1/(1-ps) otherwise. Stabilized numerators are the sample's treated and
// untreated fractions. Truncated variants clamp the finished weights at
// their own empirical percentiles (linear-interpolation order statistics).
WeightVector ipw_weights(const PSVector& ps, std::span<const std::uint8_t> a,
                         WeightVariant variant, double truncation_percentile = 0.01);

// Clamp a weight vector at its empirical (p, 1-p) percentiles. Re-truncating
// at the percentile already applied is a no-op.
WeightVector truncate_weights(const WeightVector& weights, double truncation_percentile);

// Split subjects into k strata: quantile = equal-count boundaries at the
// j/k empirical quantiles; ps_value = k equal-width intervals over
// [min(ps), max(ps)]. Intervals are right-closed, the lowest left-closed.
StratumAssignment stratify(const PSVector& ps, StratifyMethod method, int k = 5);

}  // namespace pslab
