#include <array>
#include <cmath>
#include <string>

#include "doctest.h"
#include "pslab/errors.hpp"
#include "pslab/scenario.hpp"

using namespace pslab;

namespace {

CorrelationMatrix default_pairs() {
    CorrelationMatrix corr;
    corr.set(0, 4, 0.2);  // W1, W5
    corr.set(1, 5, 0.9);  // W2, W6
    corr.set(2, 7, 0.2);  // W3, W8
    corr.set(3, 8, 0.9);  // W4, W9
    return corr;
}

}  // namespace

TEST_CASE("binary covariate roster") {
    for (int w : {1, 3, 5, 6, 8, 9}) CHECK(is_binary_covariate(w));
    for (int w : {2, 4, 7, 10}) CHECK_FALSE(is_binary_covariate(w));
}

TEST_CASE("scenario labels") {
    for (char c : {'A', 'B', 'C', 'D', 'E', 'F', 'G'}) CHECK(is_valid_scenario_label(c));
    for (char c : {'H', 'a', 'Z', '1'}) CHECK_FALSE(is_valid_scenario_label(c));
    CHECK(valid_scenario_labels() == "A, B, C, D, E, F, G");
}

TEST_CASE("interaction term catalogue is the printed list") {
    const auto& terms = all_interaction_terms();
    REQUIRE(terms.size() == 10);
    const std::array<std::array<int, 2>, 10> pairs = {{{1, 3},
                                                       {2, 4},
                                                       {3, 5},
                                                       {4, 6},
                                                       {5, 7},
                                                       {1, 6},
                                                       {2, 3},
                                                       {3, 4},
                                                       {4, 5},
                                                       {5, 6}}};
    const std::array<double, 10> mult = {0.5, 0.7, 0.5, 0.7, 0.5, 0.5, 0.7, 0.5, 0.5, 0.5};
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(terms[i].i == pairs[i][0]);
        CHECK(terms[i].j == pairs[i][1]);
        CHECK(terms[i].multiplier == mult[i]);
    }
}

TEST_CASE("quadratic term catalogue") {
    const auto& q = all_quadratic_terms();
    REQUIRE(q.size() == 3);
    CHECK(q[0] == 2);
    CHECK(q[1] == 4);
    CHECK(q[2] == 7);
}

TEST_CASE("make_scenario composes nonlinear terms by label") {
    CoefficientSet coeffs;
    const auto corr = CorrelationMatrix::identity();
    struct Expect { char label; std::size_t quads, inters; };
    const Expect table[] = {
        {'A', 0, 0}, {'B', 1, 0}, {'C', 3, 0}, {'D', 0, 3},
        {'E', 1, 3}, {'F', 0, 10}, {'G', 3, 10},
    };
    for (const auto& e : table) {
        const auto spec = make_scenario(e.label, coeffs, corr, 100);
        CHECK(spec.label == e.label);
        CHECK(spec.quadratic_terms.size() == e.quads);
        CHECK(spec.interaction_terms.size() == e.inters);
        CHECK(spec.n == 100);
    }
    // B and E use the first quadratic (W2^2); D and E the first three products
    const auto b = make_scenario('B', coeffs, corr);
    CHECK(b.quadratic_terms == std::vector<int>{2});
    const auto e = make_scenario('E', coeffs, corr);
    CHECK(e.quadratic_terms == std::vector<int>{2});
    REQUIRE(e.interaction_terms.size() == 3);
    CHECK(e.interaction_terms[2].i == 3);
    CHECK(e.interaction_terms[2].j == 5);
    // prefix property: F's list is the first 10 = the full catalogue order
    const auto f = make_scenario('F', coeffs, corr);
    for (std::size_t i = 0; i < f.interaction_terms.size(); ++i) {
        CHECK(f.interaction_terms[i].i == all_interaction_terms()[i].i);
        CHECK(f.interaction_terms[i].j == all_interaction_terms()[i].j);
    }
}

TEST_CASE("make_scenario rejects bad input") {
    CoefficientSet coeffs;
    const auto corr = CorrelationMatrix::identity();
    CHECK_THROWS_AS((void)make_scenario('H', coeffs, corr), ConfigError);
    CHECK_THROWS_AS((void)make_scenario('A', coeffs, corr, 0), ConfigError);
    CHECK_THROWS_AS((void)make_scenario('A', coeffs, corr, -5), ConfigError);
}

TEST_CASE("coefficient validation rejects non-finite values") {
    CoefficientSet coeffs;
    coeffs.validate();  // defaults are fine
    coeffs.beta[3] = std::nan("");
    CHECK_THROWS_AS(coeffs.validate(), ConfigError);
    coeffs.beta[3] = 0.6;
    coeffs.alpha[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(coeffs.validate(), ConfigError);
}

TEST_CASE("correlation matrix basics") {
    const auto corr = default_pairs();
    CHECK(corr(0, 4) == 0.2);
    CHECK(corr(4, 0) == 0.2);  // set() mirrors
    CHECK(corr(1, 5) == 0.9);
    CHECK(corr(0, 0) == 1.0);
    CHECK(corr(0, 1) == 0.0);

    const auto& flat = corr.row_major();
    CHECK(flat[0 * 10 + 4] == 0.2);
    CHECK(flat[4 * 10 + 0] == 0.2);
}

TEST_CASE("from_row_major round-trips and validates") {
    const auto corr = default_pairs();
    const auto rebuilt = CorrelationMatrix::from_row_major(corr.row_major());
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) CHECK(rebuilt(i, j) == corr(i, j));

    auto bad = corr.row_major();
    bad[3] = 0.5;  // (0,3) without (3,0): asymmetric
    CHECK_THROWS_AS((void)CorrelationMatrix::from_row_major(bad), ConfigError);

    auto baddiag = corr.row_major();
    baddiag[11] = 0.99;  // (1,1) off unit
    CHECK_THROWS_AS((void)CorrelationMatrix::from_row_major(baddiag), ConfigError);
}

TEST_CASE("cholesky of identity is identity") {
    const auto L = CorrelationMatrix::identity().cholesky_lower();
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            CHECK(L[static_cast<std::size_t>(i) * 10 + j] == (i == j ? 1.0 : 0.0));
}

TEST_CASE("cholesky factor reproduces the matrix") {
    const auto corr = default_pairs();
    const auto L = corr.cholesky_lower();
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            double dot = 0.0;
            for (int k = 0; k < 10; ++k)
                dot += L[static_cast<std::size_t>(i) * 10 + k] *
                       L[static_cast<std::size_t>(j) * 10 + k];
            CHECK(dot == doctest::Approx(corr(i, j)).epsilon(1e-12));
        }
    }
    // strictly lower-triangular output
    for (int i = 0; i < 10; ++i)
        for (int j = i + 1; j < 10; ++j) CHECK(L[static_cast<std::size_t>(i) * 10 + j] == 0.0);
}

TEST_CASE("cholesky names the offending leading minor") {
    auto corr = default_pairs();
    corr.set(1, 5, 1.01);  // |rho| > 1 makes the order-6 leading minor indefinite
    try {
        (void)corr.cholesky_lower();
        FAIL("expected FactorizationError");
    } catch (const FactorizationError& e) {
        CHECK(e.leading_minor == 6);
        CHECK(std::string(e.what()).find("minor") != std::string::npos);
    }
}
