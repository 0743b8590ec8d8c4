#include "pslab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pslab/errors.hpp"

namespace pslab {

bool is_binary_covariate(int w) {
    return std::find(kBinaryCovariates.begin(), kBinaryCovariates.end(), w) !=
           kBinaryCovariates.end();
}

CorrelationMatrix::CorrelationMatrix() {
    m_.fill(0.0);
    for (int i = 0; i < kNumCovariates; ++i) m_[idx(i, i)] = 1.0;
}

CorrelationMatrix CorrelationMatrix::from_row_major(std::span<const double> entries) {
    if (entries.size() != 100) {
        throw ConfigError("correlation matrix needs exactly 100 entries, got " +
                          std::to_string(entries.size()));
    }
    CorrelationMatrix c;
    std::copy(entries.begin(), entries.end(), c.m_.begin());
    for (int i = 0; i < kNumCovariates; ++i) {
        if (c.m_[idx(i, i)] != 1.0) {
            throw ConfigError("correlation matrix diagonal entry (" + std::to_string(i + 1) +
                              "," + std::to_string(i + 1) + ") must be 1");
        }
        for (int j = 0; j < i; ++j) {
            if (std::fabs(c.m_[idx(i, j)] - c.m_[idx(j, i)]) > 1e-12) {
                throw ConfigError("correlation matrix is not symmetric at (" +
                                  std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
            }
        }
    }
    return c;
}

void CorrelationMatrix::set(int i, int j, double rho) {
    m_[idx(i, j)] = rho;
    m_[idx(j, i)] = rho;
}

std::array<double, 100> CorrelationMatrix::cholesky_lower() const {
    std::array<double, 100> l{};
    for (int j = 0; j < kNumCovariates; ++j) {
        double d = m_[idx(j, j)];
        for (int k = 0; k < j; ++k) d -= l[idx(j, k)] * l[idx(j, k)];
        if (d <= 1e-12) {
            std::ostringstream msg;
            msg << "correlation matrix is not positive definite: leading minor of order "
                << (j + 1) << " is not positive";
            throw FactorizationError(msg.str(), j + 1);
        }
        l[idx(j, j)] = std::sqrt(d);
        for (int i = j + 1; i < kNumCovariates; ++i) {
            double s = m_[idx(i, j)];
            for (int k = 0; k < j; ++k) s -= l[idx(i, k)] * l[idx(j, k)];
            l[idx(i, j)] = s / l[idx(j, j)];
        }
    }
    return l;
}

void CoefficientSet::validate() const {
    for (double b : beta) {
        if (!std::isfinite(b)) throw ConfigError("non-finite beta coefficient");
    }
    for (double a : alpha) {
        if (!std::isfinite(a)) throw ConfigError("non-finite alpha coefficient");
    }
    if (!std::isfinite(gamma1)) throw ConfigError("non-finite gamma1");
}

const std::vector<InteractionTerm>& all_interaction_terms() {
    static const std::vector<InteractionTerm> terms = {
        {1, 3, 0.5}, {2, 4, 0.7}, {3, 5, 0.5}, {4, 6, 0.7}, {5, 7, 0.5},
        {1, 6, 0.5}, {2, 3, 0.7}, {3, 4, 0.5}, {4, 5, 0.5}, {5, 6, 0.5},
    };
    return terms;
}

const std::vector<int>& all_quadratic_terms() {
    static const std::vector<int> terms = {2, 4, 7};
    return terms;
}

bool is_valid_scenario_label(char label) { return label >= 'A' && label <= 'G'; }

std::string valid_scenario_labels() { return "A, B, C, D, E, F, G"; }

ScenarioSpec make_scenario(char label, const CoefficientSet& coeffs,
                           const CorrelationMatrix& corr, int n) {
    if (!is_valid_scenario_label(label)) {
        throw ConfigError(std::string("unknown scenario label '") + label +
                          "'; valid labels are " + valid_scenario_labels());
    }
    if (n < 1) {
        throw ConfigError("cohort size must be positive, got " + std::to_string(n));
    }
    coeffs.validate();

    const auto& quads = all_quadratic_terms();
    const auto& inters = all_interaction_terms();

    ScenarioSpec spec;
    spec.label = label;
    spec.coefficients = coeffs;
    spec.correlation = corr;
    spec.n = n;
    switch (label) {
        case 'A':
            break;
        case 'B':
            spec.quadratic_terms = {quads[0]};
            break;
        case 'C':
            spec.quadratic_terms = quads;
            break;
        case 'D':
            spec.interaction_terms = {inters.begin(), inters.begin() + 3};
            break;
        case 'E':
            spec.quadratic_terms = {quads[0]};
            spec.interaction_terms = {inters.begin(), inters.begin() + 3};
            break;
        case 'F':
            spec.interaction_terms = inters;
            break;
        case 'G':
            spec.quadratic_terms = quads;
            spec.interaction_terms = inters;
            break;
    }
    return spec;
}

}  // namespace pslab
