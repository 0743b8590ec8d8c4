#include "pslab/cohort.hpp"

#include <array>
#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pslab/errors.hpp"
#include "pslab/stats.hpp"

namespace pslab {

DataView Cohort::view() const {
    DataView v;
    v.covariates.reserve(kNumCovariates);
    for (int c = 0; c < kNumCovariates; ++c)
        v.covariates.emplace_back(w.col(c), static_cast<std::size_t>(w.rows));
    v.treatment = std::span<const std::uint8_t>(a.data(), a.size());
    return v;
}

Matrix sample_covariates(int n, const CorrelationMatrix& corr, RngStream& stream) {
    if (n < 1) throw Error("sample_covariates: n must be positive");
    const std::array<double, 100> chol = corr.cholesky_lower();

    Matrix m(n, kNumCovariates);
    std::array<double, kNumCovariates> z;
    for (int i = 0; i < n; ++i) {
        for (auto& zk : z) zk = stream.normal();
        for (int c = 0; c < kNumCovariates; ++c) {
            // lower-triangular row c of the Cholesky factor
            double x = 0.0;
            for (int k = 0; k <= c; ++k) x += chol[static_cast<std::size_t>(c) * 10 + k] * z[static_cast<std::size_t>(k)];
            if (is_binary_covariate(c + 1)) x = x > 0.0 ? 1.0 : 0.0;
            m.at(i, c) = x;
        }
    }
    return m;
}

namespace {

double ps_linear_predictor(const ScenarioSpec& spec, const Matrix& w, int i) {
    const auto& b = spec.coefficients.beta;
    double eta = b[0];
    for (int k = 1; k <= 7; ++k) eta += b[static_cast<std::size_t>(k)] * w.at(i, k - 1);
    for (int q : spec.quadratic_terms) {
        const double v = w.at(i, q - 1);
        eta += b[static_cast<std::size_t>(q)] * v * v;
    }
    for (const auto& t : spec.interaction_terms)
        eta += t.multiplier * b[static_cast<std::size_t>(t.i)] * w.at(i, t.i - 1) * w.at(i, t.j - 1);
    return eta;
}

// expit can round to exactly 0 or 1 for |eta| > ~36; keep PS usable in logits
double clamp_open_unit(double p) {
    constexpr double eps = 1e-12;
    return p < eps ? eps : (p > 1.0 - eps ? 1.0 - eps : p);
}

}  // namespace

std::vector<double> true_ps(const ScenarioSpec& spec, const Matrix& w) {
    if (w.cols != kNumCovariates) throw Error("true_ps: covariate matrix must have 10 columns");
    std::vector<double> ps(static_cast<std::size_t>(w.rows));
    for (int i = 0; i < w.rows; ++i)
        ps[static_cast<std::size_t>(i)] = clamp_open_unit(expit(ps_linear_predictor(spec, w, i)));
    return ps;
}

std::vector<std::uint8_t> assign_treatment(const std::vector<double>& ps, RngStream& stream) {
    std::vector<std::uint8_t> a(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) a[i] = stream.bernoulli(ps[i]) ? 1 : 0;
    return a;
}

double outcome_probability(const CoefficientSet& coeffs, const Matrix& w, int subject, int a) {
    // alpha indexes covariates W1..W4, W8..W10 in that order
    static constexpr int cols[7] = {0, 1, 2, 3, 7, 8, 9};
    const auto& al = coeffs.alpha;
    double eta = al[0];
    for (int k = 0; k < 7; ++k) eta += al[static_cast<std::size_t>(k + 1)] * w.at(subject, cols[k]);
    eta += coeffs.gamma1 * a;
    return expit(eta);
}

std::vector<std::uint8_t> generate_outcome(const std::vector<std::uint8_t>& a, const Matrix& w,
                                           const CoefficientSet& coeffs, RngStream& stream) {
    if (a.size() != static_cast<std::size_t>(w.rows))
        throw Error("generate_outcome: treatment length does not match covariate rows");
    std::vector<std::uint8_t> y(a.size());
    for (int i = 0; i < w.rows; ++i) {
        const double p = outcome_probability(coeffs, w, i, a[static_cast<std::size_t>(i)]);
        y[static_cast<std::size_t>(i)] = stream.bernoulli(p) ? 1 : 0;
    }
    return y;
}

Cohort generate_cohort(const ScenarioSpec& spec, std::uint64_t master_seed,
                       std::uint64_t cohort_index) {
    spec.coefficients.validate();
    Cohort c;
    c.n = spec.n;
    auto cov_stream = RngStream::from_seed(master_seed, stream_purpose::covariates, cohort_index);
    c.w = sample_covariates(spec.n, spec.correlation, cov_stream);
    c.true_ps = true_ps(spec, c.w);
    auto trt_stream = RngStream::from_seed(master_seed, stream_purpose::treatment, cohort_index);
    c.a = assign_treatment(c.true_ps, trt_stream);
    auto out_stream = RngStream::from_seed(master_seed, stream_purpose::outcome, cohort_index);
    c.y = generate_outcome(c.a, c.w, spec.coefficients, out_stream);
    return c;
}

void write_cohort_csv(const Cohort& cohort, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "w1,w2,w3,w4,w5,w6,w7,w8,w9,w10,a,y,true_ps\n";
    char buf[32];
    for (int i = 0; i < cohort.n; ++i) {
        for (int c = 0; c < kNumCovariates; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", cohort.w.at(i, c));
            out << buf << ',';
        }
        out << int(cohort.a[static_cast<std::size_t>(i)]) << ','
            << int(cohort.y[static_cast<std::size_t>(i)]) << ',';
        std::snprintf(buf, sizeof buf, "%.17g", cohort.true_ps[static_cast<std::size_t>(i)]);
        out << buf << '\n';
    }
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_field_double(const std::string& s, const std::string& path, int lineno,
                          const char* name) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw ConfigError(path + ":" + std::to_string(lineno) + ": bad " + name + " value '" + s + "'");
    return v;
}

std::uint8_t parse_field_binary(const std::string& s, const std::string& path, int lineno,
                                const char* name) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw ConfigError(path + ":" + std::to_string(lineno) + ": " + name + " must be 0 or 1, got '" + s + "'");
}

}  // namespace

Cohort read_cohort_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "w1,w2,w3,w4,w5,w6,w7,w8,w9,w10,a,y,true_ps")
        throw ConfigError(path + ":1: unexpected header '" + line + "'");

    struct Row {
        std::array<double, kNumCovariates> w;
        std::uint8_t a, y;
        double ps;
    };
    std::vector<Row> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != kNumCovariates + 3)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(kNumCovariates + 3) + " fields, got " +
                        std::to_string(fields.size()));
        Row r;
        for (int c = 0; c < kNumCovariates; ++c) {
            const std::string name = "w" + std::to_string(c + 1);
            r.w[static_cast<std::size_t>(c)] =
                parse_field_double(fields[static_cast<std::size_t>(c)], path, lineno, name.c_str());
            if (is_binary_covariate(c + 1) && r.w[static_cast<std::size_t>(c)] != 0.0 &&
                r.w[static_cast<std::size_t>(c)] != 1.0)
                throw ConfigError(path + ":" + std::to_string(lineno) + ": " + name +
                            " is a binary column but holds '" + fields[static_cast<std::size_t>(c)] + "'");
        }
        r.a = parse_field_binary(fields[10], path, lineno, "a");
        r.y = parse_field_binary(fields[11], path, lineno, "y");
        r.ps = parse_field_double(fields[12], path, lineno, "true_ps");
        if (r.ps <= 0.0 || r.ps >= 1.0)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": true_ps must lie strictly in (0,1)");
        rows.push_back(r);
    }
    if (rows.empty()) throw ConfigError(path + ": no data rows");

    Cohort c;
    c.n = static_cast<int>(rows.size());
    c.w = Matrix(c.n, kNumCovariates);
    c.a.resize(rows.size());
    c.y.resize(rows.size());
    c.true_ps.resize(rows.size());
    for (int i = 0; i < c.n; ++i) {
        const Row& r = rows[static_cast<std::size_t>(i)];
        for (int col = 0; col < kNumCovariates; ++col) c.w.at(i, col) = r.w[static_cast<std::size_t>(col)];
        c.a[static_cast<std::size_t>(i)] = r.a;
        c.y[static_cast<std::size_t>(i)] = r.y;
        c.true_ps[static_cast<std::size_t>(i)] = r.ps;
    }
    return c;
}

}  // namespace pslab
