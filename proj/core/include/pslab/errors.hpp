#pragma once

#include <stdexcept>
#include <string>

namespace pslab {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user input: malformed config files, invalid flag combinations.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A correlation matrix whose Cholesky factorization failed.
class FactorizationError : public Error {
public:
    FactorizationError(const std::string& msg, int leading_minor)
        : Error(msg), leading_minor(leading_minor) {}
    int leading_minor;  // 1-based order of the offending leading minor
};

/// No finite maximum-likelihood estimate (perfectly separated data, or a
/// degenerate all-0/all-1 outcome arm).
class SeparationError : public Error {
public:
    using Error::Error;
};

/// Singular weighted information matrix during a logistic fit.
class RankDeficiencyError : public Error {
public:
    RankDeficiencyError(const std::string& msg, std::string term)
        : Error(msg), term(std::move(term)) {}
    std::string term;  // name of the collinear term
};

/// Iteration cap reached without meeting a convergence criterion.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// An estimator could not produce a value (empty matched set, all strata
/// dropped, arm with too few subjects).
class EstimationError : public Error {
public:
    using Error::Error;
};

}  // namespace pslab
