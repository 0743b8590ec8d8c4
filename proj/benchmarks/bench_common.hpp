#pragma once

#include "pslab/scenario.hpp"

namespace bench {

inline pslab::CoefficientSet default_coefficients() {
    pslab::CoefficientSet c;
    c.beta = {0.0, 0.8, -0.25, 0.6, -0.4, -0.8, -0.5, 0.7};
    c.alpha = {-3.85, 0.3, -0.36, -0.73, -0.2, 0.71, -0.19, 0.26};
    c.gamma1 = -0.4;
    return c;
}

inline pslab::CorrelationMatrix default_correlation() {
    auto corr = pslab::CorrelationMatrix::identity();
    corr.set(0, 4, 0.2);
    corr.set(1, 5, 0.9);
    corr.set(2, 7, 0.2);
    corr.set(3, 8, 0.9);
    return corr;
}

}  // namespace bench
