#include "pslab/effect.hpp"

#include <cmath>
#include <vector>

#include "json.hpp"
#include "pslab/errors.hpp"
#include "pslab/parallel.hpp"
#include "pslab/stats.hpp"

namespace pslab {

EffectEstimate marginal_effect(std::span<const std::uint8_t> a, std::span<const std::uint8_t> y,
                               std::span<const double> weights) {
    if (a.size() != y.size()) throw Error("marginal_effect: A and Y lengths differ");
    if (!weights.empty() && weights.size() != a.size())
        throw Error("marginal_effect: weight length differs from A");

    double wsum[2] = {0.0, 0.0};
    double ysum[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        wsum[a[i]] += w;
        ysum[a[i]] += w * y[i];
    }
    if (wsum[1] == 0.0 || wsum[0] == 0.0)
        throw EstimationError(std::string("marginal effect undefined: no ") +
                              (wsum[1] == 0.0 ? "treated" : "control") + " subjects");

    const double p1 = ysum[1] / wsum[1];
    const double p0 = ysum[0] / wsum[0];
    if (p1 <= 0.0 || p1 >= 1.0 || p0 <= 0.0 || p0 >= 1.0)
        throw SeparationError("marginal effect diverges: an arm's outcomes are all " +
                              std::string((p1 >= 1.0 || p0 >= 1.0) ? "1" : "0"));

    EffectEstimate est;
    est.gamma1_hat = logit(p1) - logit(p0);
    est.n_used = static_cast<int>(a.size());
    return est;
}

EffectEstimate marginal_effect(std::span<const std::uint8_t> a, std::span<const std::uint8_t> y,
                               const WeightVector& weights) {
    return marginal_effect(a, y, std::span<const double>(weights.values));
}

EffectEstimate matched_effect(const Cohort& cohort, const MatchedSet& matches) {
    if (matches.pairs.empty()) throw EstimationError("no matched pairs: effect undefined");
    std::vector<std::uint8_t> a, y;
    a.reserve(matches.pairs.size() * 2);
    y.reserve(matches.pairs.size() * 2);
    for (const auto& pr : matches.pairs) {
        a.push_back(1);
        y.push_back(cohort.y[static_cast<std::size_t>(pr.treated)]);
        a.push_back(0);
        y.push_back(cohort.y[static_cast<std::size_t>(pr.control)]);
    }
    EffectEstimate est = marginal_effect(a, y);
    est.n_used = static_cast<int>(2 * matches.pairs.size());
    return est;
}

EffectEstimate stratified_effect(const Cohort& cohort, const StratumAssignment& strata) {
    if (strata.stratum_of.size() != static_cast<std::size_t>(cohort.n))
        throw Error("stratified_effect: stratum labels do not match cohort size");

    struct StratumResult {
        double gamma1;
        int size;
    };
    std::vector<StratumResult> kept;
    int dropped = 0;

    std::vector<std::uint8_t> a, y;
    for (int s = 1; s <= strata.k; ++s) {
        a.clear();
        y.clear();
        for (int i = 0; i < cohort.n; ++i) {
            if (strata.stratum_of[static_cast<std::size_t>(i)] != s) continue;
            a.push_back(cohort.a[static_cast<std::size_t>(i)]);
            y.push_back(cohort.y[static_cast<std::size_t>(i)]);
        }
        if (a.empty()) {
            ++dropped;
            continue;
        }
        try {
            const EffectEstimate est = marginal_effect(a, y);
            kept.push_back({est.gamma1_hat, static_cast<int>(a.size())});
        } catch (const EstimationError&) {
            ++dropped;
        } catch (const SeparationError&) {
            ++dropped;
        }
    }
    if (kept.empty())
        throw EstimationError("stratified effect undefined: all " + std::to_string(strata.k) +
                              " strata were dropped");

    double n_valid = 0.0;
    for (const auto& r : kept) n_valid += r.size;
    double pooled = 0.0;
    for (const auto& r : kept) pooled += (r.size / n_valid) * r.gamma1;

    EffectEstimate est;
    est.gamma1_hat = pooled;
    est.n_used = static_cast<int>(n_valid);
    est.strata_dropped = dropped;
    return est;
}

TruthReport true_marginal_effect(const ScenarioSpec& spec, int mc_reps, std::uint64_t seed,
                                 int threads) {
    if (mc_reps < 1) throw Error("true_marginal_effect: mc_reps must be >= 1");
    spec.coefficients.validate();

    std::vector<double> ate(static_cast<std::size_t>(mc_reps));
    std::vector<double> att(static_cast<std::size_t>(mc_reps));

    parallel_for(mc_reps, threads, [&](int r) {
        const auto rep = static_cast<std::uint64_t>(r);
        auto cov_stream = RngStream::from_seed(seed, stream_purpose::covariates, rep);
        const Matrix w = sample_covariates(spec.n, spec.correlation, cov_stream);
        const std::vector<double> ps = true_ps(spec, w);
        auto trt_stream = RngStream::from_seed(seed, stream_purpose::treatment, rep);
        const std::vector<std::uint8_t> a = assign_treatment(ps, trt_stream);

        // one uniform per subject drives both potential outcomes, so the
        // counterfactual pair is maximally coupled
        auto mc_stream = RngStream::from_seed(seed, stream_purpose::oracle, rep);
        double y1_all = 0.0, y0_all = 0.0, y1_trt = 0.0, y0_trt = 0.0;
        int n_trt = 0;
        for (int i = 0; i < spec.n; ++i) {
            const double u = mc_stream.uniform();
            const int y1 = u < outcome_probability(spec.coefficients, w, i, 1) ? 1 : 0;
            const int y0 = u < outcome_probability(spec.coefficients, w, i, 0) ? 1 : 0;
            y1_all += y1;
            y0_all += y0;
            if (a[static_cast<std::size_t>(i)]) {
                y1_trt += y1;
                y0_trt += y0;
                ++n_trt;
            }
        }
        const double n = spec.n;
        const auto effect = [r](double m1, double m0, const char* which) {
            if (m1 <= 0.0 || m1 >= 1.0 || m0 <= 0.0 || m0 >= 1.0)
                throw EstimationError("oracle replicate " + std::to_string(r) +
                                      " produced a degenerate " + which +
                                      " potential-outcome mean; increase n");
            return logit(m1) - logit(m0);
        };
        ate[static_cast<std::size_t>(r)] = effect(y1_all / n, y0_all / n, "ATE");
        if (n_trt == 0)
            throw EstimationError("oracle replicate " + std::to_string(r) + " has no treated subjects");
        att[static_cast<std::size_t>(r)] = effect(y1_trt / n_trt, y0_trt / n_trt, "ATT");
    });

    TruthReport report;
    report.conditional_gamma1 = spec.coefficients.gamma1;
    report.mc_reps = mc_reps;
    report.marginal_ate = mean(ate);
    report.marginal_att = mean(att);
    if (mc_reps > 1) {
        report.marginal_ate_se = std::sqrt(sample_variance(ate) / mc_reps);
        report.marginal_att_se = std::sqrt(sample_variance(att) / mc_reps);
    }
    return report;
}

std::string to_json(const TruthReport& report) {
    nlohmann::ordered_json j{
        {"conditional_gamma1", report.conditional_gamma1},
        {"marginal_ate", report.marginal_ate},
        {"marginal_ate_se", report.marginal_ate_se},
        {"marginal_att", report.marginal_att},
        {"marginal_att_se", report.marginal_att_se},
        {"mc_reps", report.mc_reps},
    };
    return j.dump(2);
}

}  // namespace pslab
