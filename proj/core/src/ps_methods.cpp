#include "pslab/ps_methods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "pslab/errors.hpp"
#include "pslab/stats.hpp"

namespace pslab {

namespace {

double clamp_open_unit(double p) {
    constexpr double eps = 1e-12;
    return p < eps ? eps : (p > 1.0 - eps ? 1.0 - eps : p);
}

}  // namespace

PSVector estimate_ps(const Cohort& cohort, const DesignSpec& model, const FitOptions& options) {
    model.validate();
    if (model.has_treatment())
        throw ConfigError("PS model must not contain the treatment term 'a'");

    const DataView data = cohort.view();
    const LogisticFit fit = fit_logistic(model, data, data.treatment, {}, options);
    PSVector ps;
    ps.source = PsSource::estimated;
    ps.values = predict_proba(fit, model, data);
    for (auto& v : ps.values) v = clamp_open_unit(v);
    return ps;
}

PSVector true_ps_vector(const Cohort& cohort) {
    return PSVector{cohort.true_ps, PsSource::truth};
}

DesignSpec true_ps_design(const ScenarioSpec& spec) {
    DesignSpec d = DesignSpec::main_effects(7);
    for (int q : spec.quadratic_terms) d.terms.push_back({TermKind::square, q});
    for (const auto& t : spec.interaction_terms) d.terms.push_back({TermKind::product, t.i, t.j});
    d.validate();
    return d;
}

double compute_caliper(const PSVector& ps, std::span<const std::uint8_t> a, double multiplier) {
    std::vector<double> treated, control;
    for (std::size_t i = 0; i < ps.values.size(); ++i)
        (a[i] ? treated : control).push_back(ps.values[i]);
    if (treated.size() < 2 || control.size() < 2)
        throw EstimationError("caliper undefined: need at least 2 subjects per arm, have " +
                              std::to_string(treated.size()) + " treated and " +
                              std::to_string(control.size()) + " control");
    const double s1 = sample_variance(treated);
    const double s0 = sample_variance(control);
    const double n1 = static_cast<double>(treated.size());
    const double n0 = static_cast<double>(control.size());
    const double pooled = std::sqrt(((n1 - 1.0) * s1 + (n0 - 1.0) * s0) / (n1 + n0 - 2.0));
    return multiplier * pooled;
}

MatchedSet match_nearest(const PSVector& ps, std::span<const std::uint8_t> a, double caliper,
                         RngStream& stream) {
    if (caliper < 0.0) throw Error("caliper must be non-negative");

    std::vector<int> treated;
    std::set<std::pair<double, int>> controls;  // (ps, index), index keeps ties distinct
    for (std::size_t i = 0; i < ps.values.size(); ++i) {
        if (a[i])
            treated.push_back(static_cast<int>(i));
        else
            controls.emplace(ps.values[i], static_cast<int>(i));
    }

    // Fisher-Yates with the caller's stream: the visiting order is the only
    // randomness in the whole procedure.
    for (std::size_t i = treated.size(); i > 1; --i)
        std::swap(treated[i - 1], treated[stream.below(i)]);

    constexpr int kLowestIndex = std::numeric_limits<int>::min();
    MatchedSet result;
    result.caliper_width = caliper;
    result.pairs.reserve(std::min(treated.size(), controls.size()));

    for (int t : treated) {
        if (controls.empty()) break;
        const double pt = ps.values[static_cast<std::size_t>(t)];

        const auto right = controls.lower_bound({pt, kLowestIndex});
        double best_value = 0.0;
        double best_dist = std::numeric_limits<double>::infinity();
        if (right != controls.end()) {
            best_value = right->first;
            best_dist = right->first - pt;
        }
        if (right != controls.begin()) {
            const auto left = std::prev(right);
            const double dist = pt - left->first;
            if (dist < best_dist) {
                best_value = left->first;
                best_dist = dist;
            } else if (dist == best_dist) {
                // equidistant candidates on both sides: lowest index wins
                const auto first_at_left = controls.lower_bound({left->first, kLowestIndex});
                const auto first_at_right = controls.lower_bound({best_value, kLowestIndex});
                if (first_at_left->second < first_at_right->second) best_value = left->first;
            }
        }
        if (best_dist > caliper) continue;

        const auto chosen = controls.lower_bound({best_value, kLowestIndex});
        result.pairs.push_back({t, chosen->second});
        controls.erase(chosen);
    }
    return result;
}

namespace {

void clamp_at_percentiles(std::vector<double>& values, double pct, double& low, double& high) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    low = percentile_type7_sorted(sorted, pct);
    high = percentile_type7_sorted(sorted, 1.0 - pct);
    for (auto& v : values) v = std::clamp(v, low, high);
}

void check_truncation_percentile(double pct) {
    if (!(pct > 0.0 && pct < 0.5))
        throw ConfigError("truncation percentile must lie in (0, 0.5), got " + std::to_string(pct));
}

}  // namespace

WeightVector ipw_weights(const PSVector& ps, std::span<const std::uint8_t> a,
                         WeightVariant variant, double truncation_percentile) {
    const bool stabilized =
        variant == WeightVariant::stabilized || variant == WeightVariant::truncated_stabilized;
    const bool truncated =
        variant == WeightVariant::truncated || variant == WeightVariant::truncated_stabilized;
    if (truncated) check_truncation_percentile(truncation_percentile);

    double pa = 0.0;
    for (std::size_t i = 0; i < ps.values.size(); ++i) pa += a[i];
    pa /= static_cast<double>(ps.values.size());

    WeightVector w;
    w.variant = variant;
    w.values.resize(ps.values.size());
    for (std::size_t i = 0; i < ps.values.size(); ++i) {
        const double p = ps.values[i];
        const double numer = stabilized ? (a[i] ? pa : 1.0 - pa) : 1.0;
        w.values[i] = a[i] ? numer / p : numer / (1.0 - p);
    }
    if (truncated) {
        w.truncation_percentile = truncation_percentile;
        clamp_at_percentiles(w.values, truncation_percentile, w.clamp_low, w.clamp_high);
    }
    return w;
}

WeightVector truncate_weights(const WeightVector& weights, double truncation_percentile) {
    check_truncation_percentile(truncation_percentile);
    // already clamped at this percentile: the operation is its own fixed point
    if (weights.truncation_percentile &&
        *weights.truncation_percentile == truncation_percentile)
        return weights;

    WeightVector w = weights;
    w.variant = (weights.variant == WeightVariant::stabilized ||
                 weights.variant == WeightVariant::truncated_stabilized)
                    ? WeightVariant::truncated_stabilized
                    : WeightVariant::truncated;
    w.truncation_percentile = truncation_percentile;
    clamp_at_percentiles(w.values, truncation_percentile, w.clamp_low, w.clamp_high);
    return w;
}

StratumAssignment stratify(const PSVector& ps, StratifyMethod method, int k) {
    const int n = static_cast<int>(ps.values.size());
    if (k < 1) throw Error("stratify: k must be positive");
    if (n < k)
        throw Error("stratify: need at least k=" + std::to_string(k) + " subjects, have " +
                    std::to_string(n));

    StratumAssignment out;
    out.method = method;
    out.k = k;

    std::vector<double> sorted = ps.values;
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front(), hi = sorted.back();

    if (method == StratifyMethod::ps_value && lo == hi) {
        // every subject shares one PS value; equal-width intervals collapse
        out.k = 1;
        out.boundaries = {lo, hi};
        out.stratum_of.assign(static_cast<std::size_t>(n), 1);
        out.degenerate = true;
        return out;
    }

    out.boundaries.resize(static_cast<std::size_t>(k) + 1);
    out.boundaries.front() = lo;
    out.boundaries.back() = hi;
    for (int j = 1; j < k; ++j) {
        out.boundaries[static_cast<std::size_t>(j)] =
            method == StratifyMethod::quantile
                ? percentile_type7_sorted(sorted, static_cast<double>(j) / k)
                : lo + (hi - lo) * static_cast<double>(j) / k;
    }

    // right-closed intervals, lowest left-closed: the stratum of v is one
    // more than the number of interior boundaries strictly below it
    out.stratum_of.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double v = ps.values[static_cast<std::size_t>(i)];
        int s = 1;
        for (int j = 1; j < k; ++j)
            if (out.boundaries[static_cast<std::size_t>(j)] < v) ++s;
        out.stratum_of[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

}  // namespace pslab
