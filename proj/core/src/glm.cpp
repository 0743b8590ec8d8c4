#include "pslab/glm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pslab/errors.hpp"
#include "pslab/stats.hpp"

namespace pslab {

DesignSpec DesignSpec::intercept_only() {
    DesignSpec d;
    d.terms.push_back({TermKind::intercept});
    return d;
}

DesignSpec DesignSpec::main_effects(int k) {
    DesignSpec d;
    d.terms.push_back({TermKind::intercept});
    for (int i = 1; i <= k; ++i) d.terms.push_back({TermKind::main, i});
    return d;
}

Term DesignSpec::parse_term(const std::string& text) {
    if (text == "1" || text == "intercept") return {TermKind::intercept};
    if (text == "a" || text == "A") return {TermKind::treatment};

    auto parse_w = [&](const std::string& s) -> int {
        if (s.size() < 2 || (s[0] != 'w' && s[0] != 'W')) {
            throw ConfigError("malformed model term '" + text + "'");
        }
        int num = 0;
        for (std::size_t k = 1; k < s.size(); ++k) {
            if (!std::isdigit(static_cast<unsigned char>(s[k]))) {
                throw ConfigError("malformed model term '" + text + "'");
            }
            num = num * 10 + (s[k] - '0');
        }
        if (num < 1) throw ConfigError("covariate number must be >= 1 in term '" + text + "'");
        return num;
    };

    auto star = text.find('*');
    if (star != std::string::npos) {
        return {TermKind::product, parse_w(text.substr(0, star)), parse_w(text.substr(star + 1))};
    }
    auto caret = text.find('^');
    if (caret != std::string::npos) {
        if (text.substr(caret + 1) != "2") {
            throw ConfigError("only squares are supported, got term '" + text + "'");
        }
        return {TermKind::square, parse_w(text.substr(0, caret))};
    }
    return {TermKind::main, parse_w(text)};
}

DesignSpec DesignSpec::from_term_strings(const std::vector<std::string>& lines) {
    DesignSpec d;
    d.terms.push_back({TermKind::intercept});
    for (const auto& line : lines) {
        Term t = parse_term(line);
        if (t.kind == TermKind::intercept) continue;  // already present
        d.terms.push_back(t);
    }
    d.validate();
    return d;
}

void DesignSpec::validate() const {
    int intercepts = 0;
    for (const auto& t : terms) {
        if (t.kind == TermKind::intercept) ++intercepts;
    }
    if (intercepts != 1) {
        throw ConfigError("model must contain the intercept exactly once, found " +
                          std::to_string(intercepts));
    }
    for (std::size_t a = 0; a < terms.size(); ++a) {
        for (std::size_t b = a + 1; b < terms.size(); ++b) {
            Term ta = terms[a], tb = terms[b];
            // products are unordered: wI*wJ duplicates wJ*wI
            if (ta.kind == TermKind::product && tb.kind == TermKind::product) {
                if ((ta.i == tb.i && ta.j == tb.j) || (ta.i == tb.j && ta.j == tb.i)) {
                    throw ConfigError("duplicate model term '" + pslab::term_name(tb) + "'");
                }
            } else if (ta == tb) {
                throw ConfigError("duplicate model term '" + pslab::term_name(tb) + "'");
            }
        }
    }
}

bool DesignSpec::has_treatment() const {
    return std::any_of(terms.begin(), terms.end(),
                       [](const Term& t) { return t.kind == TermKind::treatment; });
}

std::string term_name(const Term& t) {
    switch (t.kind) {
        case TermKind::intercept: return "1";
        case TermKind::main: return "w" + std::to_string(t.i);
        case TermKind::square: return "w" + std::to_string(t.i) + "^2";
        case TermKind::product:
            return "w" + std::to_string(t.i) + "*w" + std::to_string(t.j);
        case TermKind::treatment: return "a";
    }
    return "?";
}

std::string DesignSpec::term_name(std::size_t index) const {
    return pslab::term_name(terms.at(index));
}

Matrix build_design_matrix(const DesignSpec& design, const DataView& data,
                           std::span<const int> rows) {
    design.validate();

    int max_w = 0;
    for (const auto& t : design.terms) max_w = std::max({max_w, t.i, t.j});
    if (static_cast<std::size_t>(max_w) > data.covariates.size()) {
        throw Error("model references covariate w" + std::to_string(max_w) + " but only " +
                    std::to_string(data.covariates.size()) + " columns are available");
    }
    if (design.has_treatment() && data.treatment.empty()) {
        throw Error("model references the treatment but no treatment column was given");
    }

    const std::size_t n_all =
        data.covariates.empty() ? data.treatment.size() : data.covariates[0].size();
    const std::size_t n = rows.empty() ? n_all : rows.size();
    Matrix x(static_cast<int>(n), static_cast<int>(design.terms.size()));

    auto row_at = [&](std::size_t r) { return rows.empty() ? r : static_cast<std::size_t>(rows[r]); };

    for (std::size_t c = 0; c < design.terms.size(); ++c) {
        const Term& t = design.terms[c];
        double* out = x.col(static_cast<int>(c));
        switch (t.kind) {
            case TermKind::intercept:
                std::fill(out, out + n, 1.0);
                break;
            case TermKind::main: {
                const auto& w = data.covariates[t.i - 1];
                for (std::size_t r = 0; r < n; ++r) out[r] = w[row_at(r)];
                break;
            }
            case TermKind::square: {
                const auto& w = data.covariates[t.i - 1];
                for (std::size_t r = 0; r < n; ++r) {
                    const double v = w[row_at(r)];
                    out[r] = v * v;
                }
                break;
            }
            case TermKind::product: {
                const auto& wi = data.covariates[t.i - 1];
                const auto& wj = data.covariates[t.j - 1];
                for (std::size_t r = 0; r < n; ++r) out[r] = wi[row_at(r)] * wj[row_at(r)];
                break;
            }
            case TermKind::treatment:
                for (std::size_t r = 0; r < n; ++r) out[r] = data.treatment[row_at(r)];
                break;
        }
    }
    return x;
}

namespace {

using Eigen::Map;
using EMatrix = Eigen::MatrixXd;
using EVector = Eigen::VectorXd;

double weighted_loglik(const EVector& eta, std::span<const std::uint8_t> y,
                       std::span<const double> w) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[static_cast<std::size_t>(i)];
        // y*eta - log(1 + exp(eta))
        ll += wi * (y[static_cast<std::size_t>(i)] * eta[i] - log1pexp(eta[i]));
    }
    return ll;
}

[[noreturn]] void diagnose_rank_deficiency(const Map<const EMatrix>& x, const EVector& s,
                                           const std::vector<std::string>& names) {
    EMatrix xs = x;
    for (Eigen::Index c = 0; c < xs.cols(); ++c) {
        xs.col(c) = xs.col(c).cwiseProduct(s.cwiseSqrt());
    }
    Eigen::ColPivHouseholderQR<EMatrix> qr(xs);
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    std::string term = "?";
    if (rank < xs.cols()) {
        const auto col = qr.colsPermutation().indices()[rank];
        term = static_cast<std::size_t>(col) < names.size() ? names[col]
                                                            : "column " + std::to_string(col);
    }
    throw RankDeficiencyError(
        "weighted information matrix is singular: term '" + term +
            "' is collinear with the other model terms",
        term);
}

}  // namespace

double log_likelihood(const Matrix& x, std::span<const std::uint8_t> y,
                      std::span<const double> weights, std::span<const double> coefficients) {
    Map<const EMatrix> xm(x.data.data(), x.rows, x.cols);
    Map<const EVector> beta(coefficients.data(), static_cast<Eigen::Index>(coefficients.size()));
    const EVector eta = xm * beta;
    return weighted_loglik(eta, y, weights);
}

std::vector<double> score(const Matrix& x, std::span<const std::uint8_t> y,
                          std::span<const double> weights,
                          std::span<const double> coefficients) {
    Map<const EMatrix> xm(x.data.data(), x.rows, x.cols);
    Map<const EVector> beta(coefficients.data(), static_cast<Eigen::Index>(coefficients.size()));
    const EVector eta = xm * beta;
    EVector resid(x.rows);
    for (int i = 0; i < x.rows; ++i) {
        const double wi = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
        resid[i] = wi * (y[static_cast<std::size_t>(i)] - expit(eta[i]));
    }
    const EVector g = xm.transpose() * resid;
    return {g.data(), g.data() + g.size()};
}

LogisticFit fit_logistic(const Matrix& x, std::span<const std::uint8_t> y,
                         std::span<const double> weights, const FitOptions& options,
                         const std::vector<std::string>& term_names) {
    const int n = x.rows;
    const int p = x.cols;
    if (static_cast<std::size_t>(n) != y.size()) {
        throw Error("design matrix and outcome length mismatch");
    }
    if (n < p) {
        throw Error("fewer observations (" + std::to_string(n) + ") than model terms (" +
                    std::to_string(p) + ")");
    }
    if (!weights.empty()) {
        if (weights.size() != static_cast<std::size_t>(n)) {
            throw Error("weight vector length mismatch");
        }
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0 || !std::isfinite(w)) throw Error("weights must be finite and non-negative");
            total += w;
        }
        if (total <= 0.0) throw Error("weights must not all be zero");
    }

    Map<const EMatrix> xm(x.data.data(), n, p);
    EVector beta = EVector::Zero(p);
    EVector eta = EVector::Zero(n);

    auto penalized_ll = [&](const EVector& b, const EVector& e) {
        double ll = weighted_loglik(e, y, weights);
        if (options.ridge > 0.0) ll -= 0.5 * options.ridge * b.squaredNorm();
        return ll;
    };

    double ll = penalized_ll(beta, eta);

    LogisticFit fit;
    fit.coefficients.assign(static_cast<std::size_t>(p), 0.0);

    bool ll_converged = false;
    EVector grad(p), s(n), resid(n);
    for (int iter = 0; iter <= options.max_iterations; ++iter) {
        for (int i = 0; i < n; ++i) {
            const double pi = expit(eta[i]);
            const double wi = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
            resid[i] = wi * (y[static_cast<std::size_t>(i)] - pi);
            s[i] = std::max(wi * pi * (1.0 - pi), 1e-12);
        }
        grad = xm.transpose() * resid;
        if (options.ridge > 0.0) grad -= options.ridge * beta;

        fit.final_gradient_norm = grad.lpNorm<Eigen::Infinity>();
        fit.iterations = iter;
        if (fit.final_gradient_norm < options.gradient_tol || ll_converged) {
            fit.converged = true;
            break;
        }
        if (iter == options.max_iterations) break;

        EMatrix info = xm.transpose() * s.asDiagonal() * xm;
        if (options.ridge > 0.0) info.diagonal().array() += options.ridge;
        Eigen::LDLT<EMatrix> ldlt(info);
        const EVector d = ldlt.vectorD();
        const double dmax = d.cwiseAbs().maxCoeff();
        if (ldlt.info() != Eigen::Success || d.minCoeff() <= dmax * 1e-12) {
            diagnose_rank_deficiency(xm, s, term_names);
        }
        const EVector delta = ldlt.solve(grad);

        // step-halving on log-likelihood decrease
        double step = 1.0;
        bool accepted = false;
        EVector beta_new, eta_new;
        double ll_new = ll;
        for (int half = 0; half < 40; ++half) {
            beta_new = beta + step * delta;
            eta_new = xm * beta_new;
            ll_new = penalized_ll(beta_new, eta_new);
            if (ll_new >= ll - 1e-13 * (std::fabs(ll) + 1.0)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no ascent direction left; report state at current beta

        beta = beta_new;
        eta = eta_new;

        if (beta.lpNorm<Eigen::Infinity>() > options.separation_bound) {
            throw SeparationError(
                "no finite maximum-likelihood estimate: a coefficient exceeded " +
                std::to_string(options.separation_bound) +
                " in absolute value (data are separated or nearly so)");
        }

        const double rel_change = std::fabs(ll_new - ll) / (std::fabs(ll) + 1.0);
        ll = ll_new;
        // flag now, mark converged after the gradient at the new beta is recorded
        if (rel_change < options.loglik_rel_tol) ll_converged = true;
    }

    std::copy(beta.data(), beta.data() + p, fit.coefficients.begin());
    return fit;
}

LogisticFit fit_logistic(const DesignSpec& design, const DataView& data,
                         std::span<const std::uint8_t> y, std::span<const double> weights,
                         const FitOptions& options) {
    const Matrix x = build_design_matrix(design, data);
    std::vector<std::string> names;
    names.reserve(design.terms.size());
    for (std::size_t i = 0; i < design.terms.size(); ++i) names.push_back(design.term_name(i));
    return fit_logistic(x, y, weights, options, names);
}

std::vector<double> predict_proba(const LogisticFit& fit, const Matrix& x) {
    if (!fit.converged) {
        throw Error("predict_proba requires a converged fit");
    }
    if (static_cast<std::size_t>(x.cols) != fit.coefficients.size()) {
        throw Error("coefficient count does not match design matrix");
    }
    Map<const EMatrix> xm(x.data.data(), x.rows, x.cols);
    Map<const EVector> beta(fit.coefficients.data(),
                            static_cast<Eigen::Index>(fit.coefficients.size()));
    const EVector eta = xm * beta;
    std::vector<double> out(static_cast<std::size_t>(x.rows));
    for (int i = 0; i < x.rows; ++i) out[static_cast<std::size_t>(i)] = expit(eta[i]);
    return out;
}

std::vector<double> predict_proba(const LogisticFit& fit, const DesignSpec& design,
                                  const DataView& data) {
    return predict_proba(fit, build_design_matrix(design, data));
}

}  // namespace pslab
