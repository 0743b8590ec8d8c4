#include "pslab/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "pslab/errors.hpp"
#include "pslab/parallel.hpp"
#include "pslab/rng.hpp"
#include "pslab/stats.hpp"
#include "pslab/version.hpp"

namespace pslab {

namespace {

struct MethodNames {
    Method method;
    const char* key;
    const char* display;
};

constexpr MethodNames kMethodNames[] = {
    // enum order
    {Method::psm, "PSM", "PSM"},
    {Method::ipw, "IPW", "IPW"},
    {Method::ipw_trunc, "IPW-trunc", "IPW (truncated)"},
    {Method::ipw_stab, "IPW-stab", "IPW (stabilized)"},
    {Method::ipw_trunc_stab, "IPW-trunc-stab", "IPW (trunc & stab)"},
    {Method::pss_quantile, "PSS-quantile", "PSS (by quantile)"},
    {Method::pss_value, "PSS-psvalue", "PSS (by PS value)"},
};

const MethodNames& names_of(Method m) {
    const auto i = static_cast<std::size_t>(m);
    if (i >= std::size(kMethodNames)) throw Error("unknown method enum value");
    return kMethodNames[i];
}

}  // namespace

const std::string& method_key(Method m) {
    static const std::array<std::string, 7> keys = [] {
        std::array<std::string, 7> k;
        for (std::size_t i = 0; i < k.size(); ++i) k[i] = kMethodNames[i].key;
        return k;
    }();
    return keys[static_cast<std::size_t>(names_of(m).method)];
}

const std::string& method_display_name(Method m) {
    static const std::array<std::string, 7> displays = [] {
        std::array<std::string, 7> d;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = kMethodNames[i].display;
        return d;
    }();
    return displays[static_cast<std::size_t>(names_of(m).method)];
}

std::optional<Method> parse_method_key(std::string_view key) {
    const auto eq = [](std::string_view a, std::string_view b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::tolower(static_cast<unsigned char>(a[i])) !=
                std::tolower(static_cast<unsigned char>(b[i])))
                return false;
        return true;
    };
    for (const auto& n : kMethodNames)
        if (eq(key, n.key)) return n.method;
    return std::nullopt;
}

void ExperimentConfig::validate() const {
    if (scenarios.empty()) throw ConfigError("no scenarios selected");
    for (char c : scenarios)
        if (!is_valid_scenario_label(c))
            throw ConfigError(std::string("invalid scenario '") + c + "'; valid labels: " +
                              valid_scenario_labels());
    for (std::size_t i = 0; i < scenarios.size(); ++i)
        for (std::size_t j = i + 1; j < scenarios.size(); ++j)
            if (scenarios[i] == scenarios[j])
                throw ConfigError(std::string("scenario '") + scenarios[i] + "' listed twice");
    if (n < 2) throw ConfigError("n must be at least 2");
    if (reps < 1) throw ConfigError("reps must be at least 1");
    if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0))
        throw ConfigError("subsample fraction must lie in (0, 1], got " +
                          std::to_string(subsample_fraction));
    if (methods.empty()) throw ConfigError("no methods selected");
    for (std::size_t i = 0; i < methods.size(); ++i)
        for (std::size_t j = i + 1; j < methods.size(); ++j)
            if (methods[i] == methods[j])
                throw ConfigError("method '" + method_key(methods[i]) + "' listed twice");
    ps_model.validate();
    if (ps_model.has_treatment())
        throw ConfigError("PS model must not contain the treatment term 'a'");
    if (!(truncation_percentile > 0.0 && truncation_percentile < 0.5))
        throw ConfigError("truncation percentile must lie in (0, 0.5)");
    if (strata < 1) throw ConfigError("strata count must be at least 1");
    if (!(caliper_multiplier >= 0.0)) throw ConfigError("caliper multiplier must be >= 0");
    if (threads < 1) throw ConfigError("threads must be at least 1");
    if (oracle_reps < 1) throw ConfigError("oracle_reps must be at least 1");
    coefficients.validate();
    if (static_cast<int>(subsample_fraction * n) < 2)
        throw ConfigError("subsample would hold fewer than 2 subjects");
}

namespace {

std::vector<int> draw_subsample(int n, int m, RngStream& stream) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < m; ++i) {
        const auto j = i + static_cast<int>(stream.below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(m));
    std::sort(idx.begin(), idx.end());  // canonical row order
    return idx;
}

Cohort subset_cohort(const Cohort& cohort, const std::vector<int>& rows) {
    Cohort sub;
    sub.n = static_cast<int>(rows.size());
    sub.w = Matrix(sub.n, kNumCovariates);
    sub.a.resize(rows.size());
    sub.y.resize(rows.size());
    sub.true_ps.resize(rows.size());
    for (int r = 0; r < sub.n; ++r) {
        const auto src = static_cast<std::size_t>(rows[static_cast<std::size_t>(r)]);
        for (int c = 0; c < kNumCovariates; ++c)
            sub.w.at(r, c) = cohort.w.at(static_cast<int>(src), c);
        sub.a[static_cast<std::size_t>(r)] = cohort.a[src];
        sub.y[static_cast<std::size_t>(r)] = cohort.y[src];
        sub.true_ps[static_cast<std::size_t>(r)] = cohort.true_ps[src];
    }
    return sub;
}

}  // namespace

std::vector<MethodResult> run_replicate(const Cohort& cohort, const ExperimentConfig& config,
                                        std::uint64_t replicate_index) {
    const int m = static_cast<int>(
        std::floor(config.subsample_fraction * cohort.n + 1e-9));
    auto sub_stream =
        RngStream::from_seed(config.master_seed, stream_purpose::subsample, replicate_index);
    const std::vector<int> rows = draw_subsample(cohort.n, m, sub_stream);
    const Cohort sub = subset_cohort(cohort, rows);
    const std::span<const std::uint8_t> a(sub.a);
    const std::span<const std::uint8_t> y(sub.y);

    PSVector ps;
    bool ps_ok = false;
    std::string ps_error;
    try {
        ps = estimate_ps(sub, config.ps_model);
        ps_ok = true;
    } catch (const std::exception& e) {
        ps_error = std::string("PS estimation failed: ") + e.what();
    }

    std::vector<MethodResult> out;
    out.reserve(config.methods.size());
    for (Method m_id : config.methods) {
        MethodResult res;
        res.method = m_id;
        if (!ps_ok) {
            res.error = ps_error;
            out.push_back(std::move(res));
            continue;
        }
        try {
            switch (m_id) {
                case Method::psm: {
                    // keyed on the seed alone: replicates with identical
                    // subsamples must produce identical matches
                    auto match_stream =
                        RngStream::from_seed(config.master_seed, stream_purpose::matching);
                    const double caliper = compute_caliper(ps, a, config.caliper_multiplier);
                    const MatchedSet matches = match_nearest(ps, a, caliper, match_stream);
                    res.estimate = matched_effect(sub, matches);
                    break;
                }
                case Method::ipw:
                    res.estimate = marginal_effect(a, y, ipw_weights(ps, a, WeightVariant::plain));
                    break;
                case Method::ipw_trunc:
                    res.estimate = marginal_effect(
                        a, y,
                        ipw_weights(ps, a, WeightVariant::truncated, config.truncation_percentile));
                    break;
                case Method::ipw_stab:
                    res.estimate =
                        marginal_effect(a, y, ipw_weights(ps, a, WeightVariant::stabilized));
                    break;
                case Method::ipw_trunc_stab:
                    res.estimate = marginal_effect(
                        a, y,
                        ipw_weights(ps, a, WeightVariant::truncated_stabilized,
                                    config.truncation_percentile));
                    break;
                case Method::pss_quantile:
                    res.estimate =
                        stratified_effect(sub, stratify(ps, StratifyMethod::quantile, config.strata));
                    break;
                case Method::pss_value:
                    res.estimate =
                        stratified_effect(sub, stratify(ps, StratifyMethod::ps_value, config.strata));
                    break;
            }
            res.estimate.method = method_key(m_id);
            res.ok = true;
        } catch (const std::exception& e) {
            res.error = e.what();
        }
        out.push_back(std::move(res));
    }
    return out;
}

AggregateStats aggregate_estimates(std::vector<double> estimates) {
    if (estimates.empty()) throw Error("aggregate_estimates: empty input");
    std::sort(estimates.begin(), estimates.end());
    AggregateStats s;
    s.mean = mean(estimates);
    s.ci_low = percentile_type7_sorted(estimates, 0.025);
    s.ci_high = percentile_type7_sorted(estimates, 0.975);
    return s;
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    config.validate();

    ExperimentSummary summary;
    summary.config = config;

    for (char label : config.scenarios) {
        const ScenarioSpec spec =
            make_scenario(label, config.coefficients, config.correlation, config.n);

        Cohort base;
        if (!config.fresh_cohort_per_replicate) base = generate_cohort(spec, config.master_seed, 0);

        std::vector<std::vector<MethodResult>> results(static_cast<std::size_t>(config.reps));
        parallel_for(config.reps, config.threads, [&](int rep) {
            const auto r = static_cast<std::size_t>(rep);
            if (config.fresh_cohort_per_replicate) {
                const Cohort fresh = generate_cohort(spec, config.master_seed,
                                                     static_cast<std::uint64_t>(rep));
                results[r] = run_replicate(fresh, config, static_cast<std::uint64_t>(rep));
            } else {
                results[r] = run_replicate(base, config, static_cast<std::uint64_t>(rep));
            }
        });

        ScenarioSummary sc;
        sc.label = label;
        sc.oracle = true_marginal_effect(spec, config.oracle_reps, config.master_seed,
                                         config.threads);
        for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
            MethodSummary ms;
            ms.method = config.methods[mi];
            std::vector<double> estimates;
            estimates.reserve(static_cast<std::size_t>(config.reps));
            for (const auto& rep : results) {
                if (rep[mi].ok)
                    estimates.push_back(rep[mi].estimate.gamma1_hat);
                else
                    ++ms.replicates_failed;
            }
            ms.replicates_ok = static_cast<int>(estimates.size());
            if (!estimates.empty()) {
                const AggregateStats agg = aggregate_estimates(std::move(estimates));
                ms.mean_estimate = agg.mean;
                ms.ci_low = agg.ci_low;
                ms.ci_high = agg.ci_high;
            } else {
                ms.mean_estimate = std::numeric_limits<double>::quiet_NaN();
                ms.ci_low = std::numeric_limits<double>::quiet_NaN();
                ms.ci_high = std::numeric_limits<double>::quiet_NaN();
            }
            ms.high_failure_warning = ms.replicates_failed > 0.05 * config.reps;
            summary.high_failure_warning = summary.high_failure_warning || ms.high_failure_warning;
            sc.methods.push_back(ms);
        }
        summary.scenarios.push_back(std::move(sc));
    }
    return summary;
}

namespace {

nlohmann::ordered_json config_json(const ExperimentConfig& c) {
    std::string scenario_str;
    for (char s : c.scenarios) scenario_str.push_back(s);
    std::vector<std::string> method_keys;
    for (Method m : c.methods) method_keys.push_back(method_key(m));
    std::vector<std::string> terms;
    for (std::size_t i = 0; i < c.ps_model.size(); ++i) terms.push_back(c.ps_model.term_name(i));

    nlohmann::ordered_json j;
    j["scenarios"] = scenario_str;
    j["n"] = c.n;
    j["reps"] = c.reps;
    j["subsample_fraction"] = c.subsample_fraction;
    j["methods"] = method_keys;
    j["ps_model"] = terms;
    j["master_seed"] = c.master_seed;
    j["beta"] = c.coefficients.beta;
    j["alpha"] = c.coefficients.alpha;
    j["gamma1"] = c.coefficients.gamma1;
    j["correlation"] = c.correlation.row_major();
    j["truncation_percentile"] = c.truncation_percentile;
    j["strata"] = c.strata;
    j["caliper_multiplier"] = c.caliper_multiplier;
    // threads deliberately absent: worker count never changes results
    j["fresh_cohort_per_replicate"] = c.fresh_cohort_per_replicate;
    j["oracle_reps"] = c.oracle_reps;
    return j;
}

nlohmann::ordered_json oracle_json(const TruthReport& t) {
    return nlohmann::ordered_json{
        {"conditional_gamma1", t.conditional_gamma1},
        {"marginal_ate", t.marginal_ate},
        {"marginal_ate_se", t.marginal_ate_se},
        {"marginal_att", t.marginal_att},
        {"marginal_att_se", t.marginal_att_se},
        {"mc_reps", t.mc_reps},
    };
}

nlohmann::ordered_json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::string format_double(double v, const char* fmt = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace

std::string config_manifest_json(const ExperimentConfig& config) {
    nlohmann::ordered_json j;
    j["artifact_version"] = kVersion;
    j["config"] = config_json(config);
    return j.dump(2) + "\n";
}

std::string to_json(const ExperimentSummary& summary) {
    nlohmann::ordered_json j;
    j["artifact_version"] = kVersion;
    j["config"] = config_json(summary.config);
    j["high_failure_warning"] = summary.high_failure_warning;
    j["scenarios"] = nlohmann::ordered_json::array();
    for (const auto& sc : summary.scenarios) {
        nlohmann::ordered_json js;
        js["scenario"] = std::string(1, sc.label);
        js["oracle"] = oracle_json(sc.oracle);
        js["methods"] = nlohmann::ordered_json::array();
        for (const auto& ms : sc.methods) {
            js["methods"].push_back({
                {"method", method_key(ms.method)},
                {"display_name", method_display_name(ms.method)},
                {"mean", finite_or_null(ms.mean_estimate)},
                {"ci_low", finite_or_null(ms.ci_low)},
                {"ci_high", finite_or_null(ms.ci_high)},
                {"replicates_ok", ms.replicates_ok},
                {"replicates_failed", ms.replicates_failed},
                {"high_failure_warning", ms.high_failure_warning},
            });
        }
        j["scenarios"].push_back(std::move(js));
    }
    return j.dump(2) + "\n";
}

std::string to_csv(const ExperimentSummary& summary) {
    std::ostringstream out;
    out << "scenario,method,mean,ci_low,ci_high,replicates_ok,replicates_failed,"
           "high_failure_warning\n";
    for (const auto& sc : summary.scenarios) {
        for (const auto& ms : sc.methods) {
            out << sc.label << ',' << method_key(ms.method) << ',';
            if (ms.replicates_ok > 0)
                out << format_double(ms.mean_estimate) << ',' << format_double(ms.ci_low) << ','
                    << format_double(ms.ci_high);
            else
                out << ",,";
            out << ',' << ms.replicates_ok << ',' << ms.replicates_failed << ','
                << (ms.high_failure_warning ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

std::string to_markdown(const ExperimentSummary& summary) {
    // methods as rows, scenarios as columns; every method in config order
    std::ostringstream out;
    out << "| Method |";
    for (const auto& sc : summary.scenarios) out << ' ' << sc.label << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < summary.scenarios.size(); ++i) out << "---|";
    out << '\n';
    for (std::size_t mi = 0; mi < summary.config.methods.size(); ++mi) {
        out << "| " << method_display_name(summary.config.methods[mi]) << " |";
        for (const auto& sc : summary.scenarios) {
            const MethodSummary& ms = sc.methods[mi];
            if (ms.replicates_ok > 0)
                out << ' ' << format_double(ms.mean_estimate, "%.3f") << " ["
                    << format_double(ms.ci_low, "%.3f") << ", "
                    << format_double(ms.ci_high, "%.3f") << "] |";
            else
                out << " failed (" << ms.replicates_failed << '/'
                    << (ms.replicates_ok + ms.replicates_failed) << ") |";
        }
        out << '\n';
    }
    out << '\n';
    for (const auto& sc : summary.scenarios) {
        out << "Scenario " << sc.label << " oracle: marginal ATE "
            << format_double(sc.oracle.marginal_ate, "%.4f") << " (se "
            << format_double(sc.oracle.marginal_ate_se, "%.4f") << "), marginal ATT "
            << format_double(sc.oracle.marginal_att, "%.4f") << " (se "
            << format_double(sc.oracle.marginal_att_se, "%.4f") << "), conditional "
            << format_double(sc.oracle.conditional_gamma1, "%.4f") << "\n";
    }
    if (summary.high_failure_warning)
        out << "\n**Warning: at least one method failed in more than 5% of replicates.**\n";
    return out.str();
}

std::string plot_data_csv(const ExperimentSummary& summary) {
    std::ostringstream out;
    out << "scenario,method,display_name,mean,ci_low,ci_high\n";
    for (const auto& sc : summary.scenarios) {
        for (const auto& ms : sc.methods) {
            out << sc.label << ',' << method_key(ms.method) << ",\""
                << method_display_name(ms.method) << "\",";
            if (ms.replicates_ok > 0)
                out << format_double(ms.mean_estimate) << ',' << format_double(ms.ci_low) << ','
                    << format_double(ms.ci_high);
            else
                out << ",,";
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace pslab
