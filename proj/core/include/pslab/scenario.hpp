#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pslab {

inline constexpr int kNumCovariates = 10;

/// Covariates dichotomized at 0 during generation (1-based numbers).
/// The remaining four (2, 4, 7, 10) stay continuous.
inline constexpr std::array<int, 6> kBinaryCovariates = {1, 3, 5, 6, 8, 9};

bool is_binary_covariate(int w);

/// 10x10 covariate correlation matrix. Symmetric with unit diagonal by
/// construction; positive definiteness is checked when a Cholesky factor is
/// requested.
class CorrelationMatrix {
public:
    CorrelationMatrix();  // identity

    static CorrelationMatrix identity() { return CorrelationMatrix{}; }

    /// Builds from 100 row-major entries. Throws ConfigError if the matrix is
    /// not symmetric with a unit diagonal.
    static CorrelationMatrix from_row_major(std::span<const double> entries);

    double operator()(int i, int j) const { return m_[idx(i, j)]; }

    const std::array<double, 100>& row_major() const { return m_; }

    /// Sets both (i, j) and (j, i).
    void set(int i, int j, double rho);

    /// Lower-triangular Cholesky factor (row-major 10x10, upper part zero).
    /// Throws FactorizationError naming the offending leading minor when the
    /// matrix is not positive definite.
    std::array<double, 100> cholesky_lower() const;

private:
    static std::size_t idx(int i, int j) { return static_cast<std::size_t>(i) * kNumCovariates + j; }
    std::array<double, 100> m_;
};

/// Data-generating coefficients: treatment model (beta), outcome model
/// (alpha), and the conditional log-odds treatment effect gamma1.
struct CoefficientSet {
    std::array<double, 8> beta{};   // beta0..beta7
    std::array<double, 8> alpha{};  // alpha0..alpha7
    double gamma1 = -0.4;

    void validate() const;  // all finite
};

/// One scaled two-way product beta[i] * multiplier * Wi * Wj in the true
/// treatment model.
struct InteractionTerm {
    int i;              // 1-based covariate numbers
    int j;
    double multiplier;  // printed multiplier applied to beta[i]
};

/// The ten interaction terms of the most complex treatment model, in its
/// printed order. Scenario configurations draw prefixes of this list.
const std::vector<InteractionTerm>& all_interaction_terms();

/// The three quadratic terms (covariate numbers) of the most complex
/// treatment model, in printed order: W2^2, W4^2, W7^2.
const std::vector<int>& all_quadratic_terms();

/// Scenario labels A-G grade the true treatment model from purely additive
/// and linear (A) to three quadratic plus ten interaction terms (G).
bool is_valid_scenario_label(char label);
std::string valid_scenario_labels();  // "A, B, C, D, E, F, G"

/// One data-generating configuration: which nonlinear terms enter the true
/// treatment model, the coefficients, the covariate correlations, and the
/// cohort size.
struct ScenarioSpec {
    char label = 'A';
    std::vector<int> quadratic_terms;            // covariate numbers
    std::vector<InteractionTerm> interaction_terms;
    CoefficientSet coefficients;
    CorrelationMatrix correlation;
    int n = 20000;
};

/// Builds the scenario for a label:
///   A: no quadratics, no interactions     B: {W2^2}, none
///   C: all three quadratics, none         D: none, first three interactions
///   E: {W2^2}, first three                F: none, all ten
///   G: all three, all ten
/// Throws ConfigError for an unknown label or non-positive n.
ScenarioSpec make_scenario(char label, const CoefficientSet& coeffs,
                           const CorrelationMatrix& corr, int n = 20000);

}  // namespace pslab
