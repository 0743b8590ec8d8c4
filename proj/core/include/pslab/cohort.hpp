#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pslab/glm.hpp"
#include "pslab/rng.hpp"
#include "pslab/scenario.hpp"

namespace pslab {

// A simulated cohort: covariates (binary columns coded 0/1), treatment,
// outcome, and the true propensity each subject was randomized with.
// Immutable after generation; share freely across threads.
struct Cohort {
    int n = 0;
    Matrix w;                        // n x 10, column-major
    std::vector<std::uint8_t> a;     // treatment
    std::vector<std::uint8_t> y;     // outcome
    std::vector<double> true_ps;

    DataView view() const;
};

// n draws from a zero-mean unit-variance multivariate normal with the given
// correlations; binary-coded columns are then thresholded at zero.
Matrix sample_covariates(int n, const CorrelationMatrix& corr, RngStream& stream);

// True propensity of every subject under the scenario's treatment model.
// W8..W10 never enter.
std::vector<double> true_ps(const ScenarioSpec& spec, const Matrix& w);

// A[i] ~ Bernoulli(ps[i]).
std::vector<std::uint8_t> assign_treatment(const std::vector<double>& ps,
                                           RngStream& stream);

// P(Y=1 | W, A=a) under the outcome model. W5..W7 never enter.
double outcome_probability(const CoefficientSet& coeffs, const Matrix& w,
                           int subject, int a);

std::vector<std::uint8_t> generate_outcome(const std::vector<std::uint8_t>& a,
                                           const Matrix& w,
                                           const CoefficientSet& coeffs,
                                           RngStream& stream);

// Composes the four steps above with per-purpose rng streams derived from
// the master seed, so e.g. changing the treatment model leaves the covariate
// draws untouched. cohort_index separates independent cohorts under one seed.
Cohort generate_cohort(const ScenarioSpec& spec, std::uint64_t master_seed,
                       std::uint64_t cohort_index = 0);

// CSV round-trip. Header: w1..w10,a,y,true_ps. Full double precision.
void write_cohort_csv(const Cohort& cohort, const std::string& path);
Cohort read_cohort_csv(const std::string& path);

}  // namespace pslab
