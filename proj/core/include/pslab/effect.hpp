#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "pslab/cohort.hpp"
#include "pslab/ps_methods.hpp"
#include "pslab/scenario.hpp"

namespace pslab {

struct EffectEstimate {
    double gamma1_hat = 0.0;  // log-odds units
    std::string method;       // label, filled in by the caller
    int n_used = 0;
    int strata_dropped = 0;   // stratified estimates only
};

// Ground truth from counterfactual simulation. The conditional effect is the
// generating coefficient; the marginal effects are what a saturated
// two-parameter model targets, and differ from it under covariate effects.
struct TruthReport {
    double conditional_gamma1 = 0.0;
    double marginal_ate = 0.0;
    double marginal_ate_se = 0.0;
    double marginal_att = 0.0;
    double marginal_att_se = 0.0;
    int mc_reps = 0;
};

// gamma1_hat = logit(p1) - logit(p0) with p_a the (weighted) outcome mean of
// arm a: the closed form of the saturated logistic model of Y on A.
// Throws EstimationError when an arm is empty and SeparationError when an
// arm's outcomes are all equal (the MLE diverges).
EffectEstimate marginal_effect(std::span<const std::uint8_t> a, std::span<const std::uint8_t> y,
                               std::span<const double> weights = {});
EffectEstimate marginal_effect(std::span<const std::uint8_t> a, std::span<const std::uint8_t> y,
                               const WeightVector& weights);

// Unweighted marginal effect over the matched subjects only.
EffectEstimate matched_effect(const Cohort& cohort, const MatchedSet& matches);

// Stratum-size-weighted average of per-stratum marginal effects. Strata with
// an empty arm or degenerate outcomes are dropped, counted, and the weights
// renormalized over the survivors.
EffectEstimate stratified_effect(const Cohort& cohort, const StratumAssignment& strata);

// Monte Carlo counterfactual oracle: mc_reps independent cohorts, both
// potential outcomes per subject from one shared uniform draw, marginal
// effects per cohort, mean and standard error across cohorts. Replicate r of
// a given seed reuses the W and A draws of generate_cohort(spec, seed, r).
TruthReport true_marginal_effect(const ScenarioSpec& spec, int mc_reps, std::uint64_t seed,
                                 int threads = 1);

std::string to_json(const TruthReport& report);

}  // namespace pslab
