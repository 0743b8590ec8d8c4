#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "default_paths.hpp"
#include "json.hpp"
#include "pslab/cohort.hpp"
#include "pslab/config_file.hpp"
#include "pslab/effect.hpp"
#include "pslab/errors.hpp"
#include "pslab/harness.hpp"
#include "pslab/ps_methods.hpp"
#include "pslab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Flag values shared across subcommands. Parsed into one struct; each
// subcommand reads the fields it cares about.
struct Options {
    std::string scenario;
    bool all_scenarios = false;
    int n = 20000;
    int reps = -1;  // -1: subcommand default (1000 for run, 50 for oracle)
    double fraction = 0.7;
    std::uint64_t seed = 0;
    std::string methods;
    std::string ps_model = "main";
    std::string coeffs_file;
    std::string corr_file;
    double truncation_pct = 0.01;
    int strata = 5;
    std::string strata_method;
    double caliper_mult = 0.1;
    std::string format = "md";
    std::string out_dir;
    int threads = 1;
    bool fresh_cohorts = false;
    int oracle_reps = 50;
    std::string cohort_file;
};

void add_common_flags(CLI::App* cmd, Options& o) {
    auto* scenario = cmd->add_option("--scenario", o.scenario,
                                     "Scenario label (" + pslab::valid_scenario_labels() + ")");
    cmd->add_flag("--all-scenarios", o.all_scenarios, "Run every scenario A-G")
        ->excludes(scenario);
    cmd->add_option("--n", o.n, "Cohort size")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Master seed")->envname("PSLAB_SEED");
    cmd->add_option("--coeffs", o.coeffs_file,
                    "Coefficient file (default: the shipped defaults.cfg)");
    cmd->add_option("--corr", o.corr_file,
                    "Correlation file (default: the corr block of the coefficient file)");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--threads", o.threads, "Worker thread cap (never changes results)")
        ->check(CLI::PositiveNumber);
}

void add_method_flags(CLI::App* cmd, Options& o) {
    std::string keys;
    for (auto m : pslab::kAllMethods) {
        if (!keys.empty()) keys += ",";
        keys += pslab::method_key(m);
    }
    cmd->add_option("--methods", o.methods, "Comma-separated subset of: " + keys);
    cmd->add_option("--ps-model", o.ps_model,
                    "PS model: 'main' (all ten main effects), 'true' (the scenario's "
                    "generating design), or a term file");
    cmd->add_option("--truncation-pct", o.truncation_pct,
                    "Weight truncation percentile, in (0, 0.5)");
    cmd->add_option("--strata", o.strata, "Stratum count")->check(CLI::PositiveNumber);
    cmd->add_option("--strata-method", o.strata_method,
                    "Restrict stratification to one splitting rule")
        ->check(CLI::IsMember({"quantile", "psvalue"}));
    cmd->add_option("--caliper-mult", o.caliper_mult,
                    "Caliper as a multiple of the pooled PS standard deviation");
    cmd->add_option("--format", o.format, "Stdout format")
        ->check(CLI::IsMember({"json", "csv", "md"}));
}

std::vector<char> resolve_scenarios(const Options& o) {
    if (o.all_scenarios) return {'A', 'B', 'C', 'D', 'E', 'F', 'G'};
    if (o.scenario.empty())
        throw pslab::ConfigError("no scenario selected: pass --scenario <label> or --all-scenarios");
    if (o.scenario.size() != 1 || !pslab::is_valid_scenario_label(o.scenario[0]))
        throw pslab::ConfigError("invalid scenario '" + o.scenario + "'; valid labels: " +
                                 pslab::valid_scenario_labels());
    return {o.scenario[0]};
}

std::string resolve_default_config() {
    if (fs::exists(pslab_cli::kInstalledDefaultConfig)) return pslab_cli::kInstalledDefaultConfig;
    if (fs::exists(pslab_cli::kSourceDefaultConfig)) return pslab_cli::kSourceDefaultConfig;
    throw pslab::ConfigError("no default coefficient file found; pass --coeffs <file>");
}

struct GeneratingModel {
    pslab::CoefficientSet coefficients;
    pslab::CorrelationMatrix correlation;
};

GeneratingModel resolve_generating_model(const Options& o) {
    const std::string coeffs_path = o.coeffs_file.empty() ? resolve_default_config() : o.coeffs_file;
    const pslab::ParsedConfig parsed = pslab::parse_config_file(coeffs_path);
    if (!parsed.coefficients)
        throw pslab::ConfigError(coeffs_path + ": no coefficients (beta0..beta7, alpha0..alpha7)");

    GeneratingModel model;
    model.coefficients = *parsed.coefficients;
    if (!o.corr_file.empty()) {
        const pslab::ParsedConfig corr_cfg = pslab::parse_config_file(o.corr_file);
        if (!corr_cfg.correlation)
            throw pslab::ConfigError(o.corr_file + ": no corr block");
        model.correlation = *corr_cfg.correlation;
    } else if (parsed.correlation) {
        model.correlation = *parsed.correlation;
    }  // else identity
    return model;
}

std::vector<pslab::Method> resolve_methods(const Options& o) {
    std::vector<pslab::Method> methods;
    if (o.methods.empty()) {
        methods.assign(pslab::kAllMethods.begin(), pslab::kAllMethods.end());
    } else {
        std::size_t start = 0;
        while (start <= o.methods.size()) {
            const auto comma = o.methods.find(',', start);
            const std::string key =
                o.methods.substr(start, comma == std::string::npos ? comma : comma - start);
            if (!key.empty()) {
                const auto m = pslab::parse_method_key(key);
                if (!m) {
                    std::string keys;
                    for (auto mm : pslab::kAllMethods) {
                        if (!keys.empty()) keys += ", ";
                        keys += pslab::method_key(mm);
                    }
                    throw pslab::ConfigError("unknown method '" + key + "'; valid methods: " + keys);
                }
                methods.push_back(*m);
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (methods.empty()) throw pslab::ConfigError("--methods selected nothing");
    }
    if (!o.strata_method.empty()) {
        const pslab::Method drop = o.strata_method == "quantile" ? pslab::Method::pss_value
                                                                 : pslab::Method::pss_quantile;
        std::erase(methods, drop);
        if (methods.empty())
            throw pslab::ConfigError("--strata-method removed every selected method");
    }
    return methods;
}

pslab::DesignSpec resolve_ps_model(const Options& o, const std::vector<char>& scenarios) {
    if (o.ps_model == "main") return pslab::DesignSpec::main_effects(pslab::kNumCovariates);
    if (o.ps_model == "true") {
        if (scenarios.size() != 1)
            throw pslab::ConfigError(
                "--ps-model true needs a single --scenario (the design differs per scenario)");
        // coefficients are irrelevant for the term list
        return pslab::true_ps_design(
            pslab::make_scenario(scenarios[0], pslab::CoefficientSet{}, {}, 2));
    }
    return pslab::read_ps_model_file(o.ps_model);
}

fs::path ensure_out_dir(const Options& o) {
    const fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw pslab::Error("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw pslab::Error("write failed for '" + path.string() + "'");
}

pslab::ExperimentConfig build_experiment_config(const Options& o) {
    pslab::ExperimentConfig config;
    config.scenarios = resolve_scenarios(o);
    config.n = o.n;
    config.reps = o.reps < 0 ? 1000 : o.reps;
    config.subsample_fraction = o.fraction;
    config.methods = resolve_methods(o);
    config.ps_model = resolve_ps_model(o, config.scenarios);
    config.master_seed = o.seed;
    const GeneratingModel model = resolve_generating_model(o);
    config.coefficients = model.coefficients;
    config.correlation = model.correlation;
    config.truncation_percentile = o.truncation_pct;
    config.strata = o.strata;
    config.caliper_multiplier = o.caliper_mult;
    config.threads = o.threads;
    config.fresh_cohort_per_replicate = o.fresh_cohorts;
    config.oracle_reps = o.oracle_reps;
    config.validate();
    return config;
}

int cmd_generate(const Options& o) {
    const auto scenarios = resolve_scenarios(o);
    const GeneratingModel model = resolve_generating_model(o);
    const fs::path dir = ensure_out_dir(o);
    for (char label : scenarios) {
        const auto spec = pslab::make_scenario(label, model.coefficients, model.correlation, o.n);
        const pslab::Cohort cohort = pslab::generate_cohort(spec, o.seed);
        const fs::path path = dir / (std::string("cohort_") + label + ".csv");
        pslab::write_cohort_csv(cohort, path.string());
        std::cout << path.string() << "\n";
    }
    return 0;
}

ordered_json truth_report_json(const pslab::TruthReport& t) {
    return ordered_json{
        {"conditional_gamma1", t.conditional_gamma1},
        {"marginal_ate", t.marginal_ate},
        {"marginal_ate_se", t.marginal_ate_se},
        {"marginal_att", t.marginal_att},
        {"marginal_att_se", t.marginal_att_se},
        {"mc_reps", t.mc_reps},
    };
}

int cmd_estimate(const Options& o) {
    if (o.cohort_file.empty())
        throw pslab::ConfigError("estimate needs --cohort <csv file>");
    const pslab::Cohort cohort = pslab::read_cohort_csv(o.cohort_file);

    // one pass over the full cohort = a single fraction-1.0 replicate
    pslab::ExperimentConfig config;
    config.scenarios = {'A'};  // unused; validate() wants something well-formed
    config.n = cohort.n;
    config.reps = 1;
    config.subsample_fraction = 1.0;
    config.methods = resolve_methods(o);
    const bool needs_scenario = o.ps_model == "true";
    config.ps_model =
        resolve_ps_model(o, needs_scenario ? resolve_scenarios(o) : std::vector<char>{'A'});
    config.master_seed = o.seed;
    config.truncation_percentile = o.truncation_pct;
    config.strata = o.strata;
    config.caliper_multiplier = o.caliper_mult;
    config.threads = o.threads;
    config.validate();

    const auto results = pslab::run_replicate(cohort, config, 0);

    ordered_json j;
    j["cohort"] = o.cohort_file;
    j["n"] = cohort.n;
    j["methods"] = ordered_json::array();
    std::ostringstream csv, md;
    csv << "method,ok,gamma1_hat,n_used,strata_dropped,error\n";
    md << "| Method | Estimate | n used | Notes |\n|---|---|---|---|\n";
    for (const auto& r : results) {
        const std::string key = pslab::method_key(r.method);
        ordered_json jm{{"method", key},
                        {"display_name", pslab::method_display_name(r.method)},
                        {"ok", r.ok}};
        if (r.ok) {
            jm["gamma1_hat"] = r.estimate.gamma1_hat;
            jm["n_used"] = r.estimate.n_used;
            jm["strata_dropped"] = r.estimate.strata_dropped;
            csv << key << ",1," << r.estimate.gamma1_hat << ',' << r.estimate.n_used << ','
                << r.estimate.strata_dropped << ",\n";
            md << "| " << pslab::method_display_name(r.method) << " | " << r.estimate.gamma1_hat
               << " | " << r.estimate.n_used << " |  |\n";
        } else {
            jm["error"] = r.error;
            csv << key << ",0,,,," << '"' << r.error << '"' << '\n';
            md << "| " << pslab::method_display_name(r.method) << " | failed |  | " << r.error
               << " |\n";
        }
        j["methods"].push_back(std::move(jm));
    }

    std::string text;
    if (o.format == "json")
        text = j.dump(2) + "\n";
    else if (o.format == "csv")
        text = csv.str();
    else
        text = md.str();
    std::cout << text;
    if (!o.out_dir.empty()) {
        const fs::path dir = ensure_out_dir(o);
        const char* ext = o.format == "json" ? ".json" : (o.format == "csv" ? ".csv" : ".md");
        write_text_file(dir / (std::string("estimates") + ext), text);
    }
    return 0;
}

int cmd_run(const Options& o) {
    const pslab::ExperimentConfig config = build_experiment_config(o);
    const pslab::ExperimentSummary summary = pslab::run_experiment(config);

    const fs::path dir = ensure_out_dir(o);
    write_text_file(dir / "summary.json", pslab::to_json(summary));
    write_text_file(dir / "summary.csv", pslab::to_csv(summary));
    write_text_file(dir / "summary.md", pslab::to_markdown(summary));
    write_text_file(dir / "figure1_data.csv", pslab::plot_data_csv(summary));
    write_text_file(dir / "manifest.json", pslab::config_manifest_json(config));

    if (o.format == "json")
        std::cout << pslab::to_json(summary);
    else if (o.format == "csv")
        std::cout << pslab::to_csv(summary);
    else
        std::cout << pslab::to_markdown(summary);
    if (summary.high_failure_warning)
        std::cerr << "warning: at least one method failed in more than 5% of replicates\n";
    return 0;
}

int cmd_oracle(const Options& o) {
    const auto scenarios = resolve_scenarios(o);
    const GeneratingModel model = resolve_generating_model(o);
    const int reps = o.reps < 0 ? 50 : o.reps;

    ordered_json j;
    for (char label : scenarios) {
        const auto spec = pslab::make_scenario(label, model.coefficients, model.correlation, o.n);
        const pslab::TruthReport report =
            pslab::true_marginal_effect(spec, reps, o.seed, o.threads);
        j[std::string(1, label)] = truth_report_json(report);
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Propensity-score method benchmark on simulated cohorts"};
    app.set_version_flag("--version", pslab::kVersion);
    app.require_subcommand(1);

    Options o;
    auto* generate = app.add_subcommand("generate", "Write simulated cohort CSVs");
    auto* estimate = app.add_subcommand("estimate", "Run methods once on a cohort file");
    auto* run = app.add_subcommand("run", "Full replicated experiment with summary artifacts");
    auto* oracle = app.add_subcommand("oracle", "Counterfactual ground-truth report");

    for (CLI::App* cmd : {generate, estimate, run, oracle}) add_common_flags(cmd, o);
    for (CLI::App* cmd : {estimate, run}) add_method_flags(cmd, o);
    for (CLI::App* cmd : {run, oracle})
        cmd->add_option("--reps", o.reps,
                        "Replicates (run default 1000; oracle default 50 cohorts)")
            ->check(CLI::PositiveNumber);
    run->add_option("--fraction", o.fraction, "Subsample fraction in (0, 1]");
    run->add_flag("--fresh-cohorts", o.fresh_cohorts,
                  "Generate an independent cohort per replicate instead of resampling one base cohort");
    run->add_option("--oracle-reps", o.oracle_reps, "Oracle cohorts attached to run summaries")
        ->check(CLI::PositiveNumber);
    estimate->add_option("--cohort", o.cohort_file, "Input cohort CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*generate) return cmd_generate(o);
        if (*estimate) return cmd_estimate(o);
        if (*run) return cmd_run(o);
        return cmd_oracle(o);
    } catch (const pslab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
