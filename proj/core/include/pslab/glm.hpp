#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pslab {

/// One column of a logistic model's linear predictor.
enum class TermKind { intercept, main, square, product, treatment };

struct Term {
    TermKind kind;
    int i = 0;  // 1-based covariate number (main/square/product)
    int j = 0;  // second covariate (product only)

    bool operator==(const Term&) const = default;
};

/// Ordered list of model terms. The intercept must appear exactly once and
/// no term may repeat.
struct DesignSpec {
    std::vector<Term> terms;

    static DesignSpec intercept_only();
    /// Intercept plus main effects W1..Wk.
    static DesignSpec main_effects(int k);

    /// Parses a term written as "1", "wK", "wK^2", "wI*wJ", or "a".
    static Term parse_term(const std::string& text);

    /// Builds intercept + parsed terms (intercept implied; an explicit "1"
    /// line is also accepted). Throws ConfigError on malformed input.
    static DesignSpec from_term_strings(const std::vector<std::string>& lines);

    void validate() const;
    bool has_treatment() const;
    std::string term_name(std::size_t index) const;
    std::size_t size() const { return terms.size(); }
};

std::string term_name(const Term& t);

/// Dense column-major matrix, just large enough for design matrices.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // column-major

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(c) * rows + r]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(c) * rows + r]; }
    double* col(int c) { return data.data() + static_cast<std::size_t>(c) * rows; }
    const double* col(int c) const { return data.data() + static_cast<std::size_t>(c) * rows; }
};

/// Columns a DesignSpec can reference: covariate columns (in W1..Wk order)
/// and, when treatment enters the model, the treatment indicator.
struct DataView {
    std::vector<std::span<const double>> covariates;
    std::span<const std::uint8_t> treatment = {};
};

/// Evaluates the design over all rows, or over the given row subset.
Matrix build_design_matrix(const DesignSpec& design, const DataView& data,
                           std::span<const int> rows = {});

struct FitOptions {
    double loglik_rel_tol = 1e-10;  // relative log-likelihood change
    double gradient_tol = 1e-8;     // gradient max-norm
    int max_iterations = 100;
    double separation_bound = 30.0;  // |coefficient| beyond which the MLE is declared divergent
    double ridge = 0.0;              // optional L2 penalty; 0 = plain ML (default)
};

struct LogisticFit {
    std::vector<double> coefficients;  // log-odds units, one per term
    bool converged = false;
    int iterations = 0;
    double final_gradient_norm = 0.0;
    bool separation_detected = false;
};

/// Weighted maximum-likelihood logistic regression via Newton/IRLS with
/// step-halving, started from the zero vector. Maximizes
///   sum_i w_i * (y_i * log p_i + (1 - y_i) * log(1 - p_i)).
/// Stops when the relative log-likelihood change drops below
/// loglik_rel_tol or the gradient max-norm below gradient_tol, whichever
/// happens first, within max_iterations.
///
/// Throws SeparationError when any |coefficient| exceeds separation_bound
/// during iteration, and RankDeficiencyError (naming the collinear term)
/// when the weighted information matrix is singular.
LogisticFit fit_logistic(const Matrix& x, std::span<const std::uint8_t> y,
                         std::span<const double> weights = {},
                         const FitOptions& options = {},
                         const std::vector<std::string>& term_names = {});

LogisticFit fit_logistic(const DesignSpec& design, const DataView& data,
                         std::span<const std::uint8_t> y,
                         std::span<const double> weights = {},
                         const FitOptions& options = {});

/// Weighted Bernoulli log-likelihood at the given coefficients.
double log_likelihood(const Matrix& x, std::span<const std::uint8_t> y,
                      std::span<const double> weights, std::span<const double> coefficients);

/// Score vector (gradient of the log-likelihood) at the given coefficients.
std::vector<double> score(const Matrix& x, std::span<const std::uint8_t> y,
                          std::span<const double> weights,
                          std::span<const double> coefficients);

/// Fitted probabilities expit(X * coefficients). Requires a converged fit.
std::vector<double> predict_proba(const LogisticFit& fit, const Matrix& x);
std::vector<double> predict_proba(const LogisticFit& fit, const DesignSpec& design,
                                  const DataView& data);

}  // namespace pslab
