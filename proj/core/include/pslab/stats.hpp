#pragma once

#include <span>
#include <vector>

namespace pslab {

/// Numerically stable logistic function 1 / (1 + exp(-x)).
double expit(double x);

/// log(p / (1 - p)); requires p strictly inside (0, 1).
double logit(double p);

/// log(1 + exp(x)) without overflow.
double log1pexp(double x);

/// Inverse of the standard normal CDF (Wichura's AS241 rational
/// approximation, accurate to ~1e-15). Requires p in (0, 1).
double normal_quantile(double p);

double mean(std::span<const double> values);

/// Unbiased sample variance (n - 1 denominator). Requires n >= 2.
double sample_variance(std::span<const double> values);

/// Quantile by linear interpolation between order statistics: with the
/// sorted sample x[0..n-1] and h = (n - 1) * p, returns
/// x[floor(h)] + (h - floor(h)) * (x[floor(h) + 1] - x[floor(h)])
/// (the "type 7" rule). Input must already be sorted ascending.
double percentile_type7_sorted(std::span<const double> sorted, double p);

/// Convenience over an unsorted sample (copies and sorts).
double percentile_type7(std::span<const double> values, double p);

}  // namespace pslab
