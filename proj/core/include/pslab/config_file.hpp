#pragma once

#include <optional>
#include <string>

#include "pslab/glm.hpp"
#include "pslab/scenario.hpp"

namespace pslab {

// Content of a coefficient/correlation file. Either section may be absent;
// a file holding only a corr block is a valid correlation-only file.
struct ParsedConfig {
    std::optional<CoefficientSet> coefficients;
    std::optional<CorrelationMatrix> correlation;
};

// Plain-text `key = value` format, '#' starts a comment. Recognized keys:
// beta0..beta7, alpha0..alpha7, gamma1 (each one real), and corr, whose
// value is 100 whitespace-separated reals (row-major 10x10, continuing on
// following lines). If any beta/alpha appears, all sixteen are required;
// gamma1 falls back to its default. Errors name file, line, and field.
ParsedConfig parse_config_file(const std::string& path);

// PS-model term file: one term per line ("w3", "w2^2", "w1*w4"), '#'
// comments, intercept implied. The treatment indicator is rejected.
DesignSpec read_ps_model_file(const std::string& path);

}  // namespace pslab
