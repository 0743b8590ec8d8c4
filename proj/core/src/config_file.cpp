#include "pslab/config_file.hpp"

#include <array>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "pslab/errors.hpp"

namespace pslab {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

[[noreturn]] void fail(const std::string& path, int lineno, const std::string& msg) {
    throw ConfigError(path + ":" + std::to_string(lineno) + ": " + msg);
}

double parse_real(const std::string& path, int lineno, const std::string& field,
                  const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        fail(path, lineno, field + ": expected a finite number, got '" + text + "'");
    return v;
}

}  // namespace

ParsedConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");

    std::map<std::string, double> scalars;
    std::map<std::string, int> scalar_lines;
    std::vector<double> corr_values;
    bool corr_seen = false;
    bool collecting_corr = false;
    int lineno = 0;

    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (collecting_corr && eq == std::string::npos) {
            std::istringstream tokens(line);
            std::string tok;
            while (tokens >> tok) {
                if (corr_values.size() == 100)
                    fail(path, lineno, "corr: more than 100 values");
                corr_values.push_back(parse_real(path, lineno, "corr", tok));
            }
            if (corr_values.size() == 100) collecting_corr = false;
            continue;
        }
        if (eq == std::string::npos)
            fail(path, lineno, "expected 'key = value', got '" + line + "'");

        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (collecting_corr)
            fail(path, lineno, "corr: block interrupted after " +
                                   std::to_string(corr_values.size()) + " of 100 values");

        if (key == "corr") {
            if (corr_seen) fail(path, lineno, "corr given twice");
            corr_seen = true;
            collecting_corr = true;
            std::istringstream tokens(value);
            std::string tok;
            while (tokens >> tok) {
                if (corr_values.size() == 100)
                    fail(path, lineno, "corr: more than 100 values");
                corr_values.push_back(parse_real(path, lineno, "corr", tok));
            }
            if (corr_values.size() == 100) collecting_corr = false;
            continue;
        }

        static const std::array<const char*, 17> known = {
            "beta0", "beta1", "beta2", "beta3", "beta4", "beta5", "beta6", "beta7",
            "alpha0", "alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6", "alpha7",
            "gamma1"};
        bool recognized = false;
        for (const char* k : known) recognized = recognized || key == k;
        if (!recognized) fail(path, lineno, "unknown field '" + key + "'");
        if (scalars.count(key))
            fail(path, lineno, key + " given twice (first at line " +
                                   std::to_string(scalar_lines[key]) + ")");
        scalars[key] = parse_real(path, lineno, key, value);
        scalar_lines[key] = lineno;
    }

    if (collecting_corr)
        throw ConfigError(path + ": corr block ended after " +
                          std::to_string(corr_values.size()) + " of 100 values");

    ParsedConfig out;
    if (corr_seen) {
        try {
            out.correlation = CorrelationMatrix::from_row_major(corr_values);
        } catch (const Error& e) {
            throw ConfigError(path + ": corr: " + e.what());
        }
    }

    const bool any_coeff = !scalars.empty();
    if (any_coeff) {
        CoefficientSet cs;
        for (int k = 0; k < 8; ++k) {
            const std::string bkey = "beta" + std::to_string(k);
            const std::string akey = "alpha" + std::to_string(k);
            const auto b = scalars.find(bkey);
            const auto a = scalars.find(akey);
            if (b == scalars.end()) throw ConfigError(path + ": missing field " + bkey);
            if (a == scalars.end()) throw ConfigError(path + ": missing field " + akey);
            cs.beta[static_cast<std::size_t>(k)] = b->second;
            cs.alpha[static_cast<std::size_t>(k)] = a->second;
        }
        if (const auto g = scalars.find("gamma1"); g != scalars.end()) cs.gamma1 = g->second;
        cs.validate();
        out.coefficients = cs;
    }
    return out;
}

DesignSpec read_ps_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open PS model file '" + path + "'");

    DesignSpec design;
    design.terms.push_back({TermKind::intercept});
    bool explicit_intercept = false;
    int lineno = 0;
    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        Term t;
        try {
            t = DesignSpec::parse_term(line);
        } catch (const Error& e) {
            fail(path, lineno, e.what());
        }
        if (t.kind == TermKind::treatment)
            fail(path, lineno, "the treatment term 'a' is not allowed in a PS model");
        if (t.kind == TermKind::intercept) {
            if (explicit_intercept) fail(path, lineno, "intercept given twice");
            explicit_intercept = true;
            continue;  // already present
        }
        design.terms.push_back(t);
    }
    try {
        design.validate();
    } catch (const Error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (design.terms.size() == 1 && !explicit_intercept)
        throw ConfigError(path + ": no model terms (write '1' for an intercept-only model)");
    return design;
}

}  // namespace pslab
