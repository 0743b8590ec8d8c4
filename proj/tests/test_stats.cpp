#include <cmath>
#include <vector>

#include "doctest.h"
#include "pslab/stats.hpp"

using doctest::Approx;

TEST_CASE("expit basics and stability") {
    CHECK(pslab::expit(0.0) == 0.5);
    CHECK(pslab::expit(710.0) == Approx(1.0));
    CHECK(pslab::expit(-710.0) >= 0.0);
    CHECK(pslab::expit(-710.0) < 1e-300);
    // no overflow at extreme negative arguments
    CHECK(std::isfinite(pslab::expit(-5000.0)));
}

TEST_CASE("logit inverts expit") {
    for (double x : {-10.0, -4.2, -1.0, 0.0, 0.3, 2.5, 10.0}) {
        CHECK(pslab::logit(pslab::expit(x)) == Approx(x).epsilon(1e-12));
    }
    // near p = 1 the round trip is limited by cancellation in 1 - p
    CHECK(pslab::logit(pslab::expit(30.0)) == Approx(30.0).epsilon(1e-3));
    CHECK(pslab::logit(pslab::expit(-30.0)) == Approx(-30.0).epsilon(1e-12));
    CHECK(pslab::logit(0.625) == Approx(0.5108256237659907).epsilon(1e-15));
}

TEST_CASE("log1pexp agrees with the naive form and never overflows") {
    for (double x : {-20.0, -1.0, 0.0, 1.0, 20.0}) {
        CHECK(pslab::log1pexp(x) == Approx(std::log1p(std::exp(x))).epsilon(1e-14));
    }
    CHECK(pslab::log1pexp(1000.0) == Approx(1000.0).epsilon(1e-14));
    CHECK(pslab::log1pexp(-1000.0) >= 0.0);
    CHECK(pslab::log1pexp(-1000.0) < 1e-300);
}

TEST_CASE("normal_quantile reproduces reference inverse-CDF values") {
    // Reference values from an independent high-precision implementation.
    struct Point { double p, z; };
    const Point pts[] = {
        {1e-10, -6.361340902404056},
        {1e-6, -4.753424308822899},
        {0.001, -3.090232306167813},
        {0.025, -1.9599639845400545},
        {0.1, -1.2815515655446004},
        {0.3, -0.5244005127080409},
        {0.7, 0.5244005127080407},
        {0.975, 1.959963984540054},
        {0.999999, 4.753424308817087},
        {0.9999999999, 6.361340889697422},
    };
    for (const auto& pt : pts) {
        CHECK(pslab::normal_quantile(pt.p) == Approx(pt.z).epsilon(1e-14));
    }
    CHECK(pslab::normal_quantile(0.5) == 0.0);
}

TEST_CASE("normal_quantile is antisymmetric and monotone") {
    double prev = -1e300;
    for (double p = 0.01; p < 1.0; p += 0.01) {
        const double z = pslab::normal_quantile(p);
        CHECK(z > prev);
        prev = z;
        CHECK(z == Approx(-pslab::normal_quantile(1.0 - p)).epsilon(1e-10));
    }
}

TEST_CASE("mean and sample_variance on hand data") {
    const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    CHECK(pslab::mean(v) == Approx(2.5));
    // sum of squared deviations 5, n-1 = 3
    CHECK(pslab::sample_variance(v) == Approx(5.0 / 3.0).epsilon(1e-15));
    const std::vector<double> c = {4.2, 4.2, 4.2};
    CHECK(pslab::sample_variance(c) == 0.0);
}

TEST_CASE("type-7 percentile matches reference values on 1..100") {
    std::vector<double> v(100);
    for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = i + 1.0;
    CHECK(pslab::percentile_type7_sorted(v, 0.05) == Approx(5.95).epsilon(1e-14));
    CHECK(pslab::percentile_type7_sorted(v, 0.95) == Approx(95.05).epsilon(1e-14));
    CHECK(pslab::percentile_type7_sorted(v, 0.0) == 1.0);
    CHECK(pslab::percentile_type7_sorted(v, 1.0) == 100.0);
    CHECK(pslab::percentile_type7_sorted(v, 0.5) == Approx(50.5).epsilon(1e-14));
}

TEST_CASE("type-7 percentile matches reference values on an uneven sample") {
    // unsorted on purpose; the convenience overload sorts a copy
    const std::vector<double> v = {3.1, 0.2, 7.7, 5.5, 2.2, 9.9, 4.4};
    CHECK(pslab::percentile_type7(v, 0.0) == Approx(0.2));
    CHECK(pslab::percentile_type7(v, 0.025) == Approx(0.5).epsilon(1e-14));
    CHECK(pslab::percentile_type7(v, 0.25) == Approx(2.65).epsilon(1e-12));
    CHECK(pslab::percentile_type7(v, 0.5) == Approx(4.4));
    CHECK(pslab::percentile_type7(v, 0.975) == Approx(9.57).epsilon(1e-12));
    CHECK(pslab::percentile_type7(v, 1.0) == Approx(9.9));
}

TEST_CASE("type-7 percentile interpolates linearly between order statistics") {
    const std::vector<double> v = {10.0, 20.0};
    // h = (n-1)p = p
    CHECK(pslab::percentile_type7_sorted(v, 0.3) == Approx(13.0).epsilon(1e-14));
    const std::vector<double> one = {42.0};
    CHECK(pslab::percentile_type7_sorted(one, 0.77) == 42.0);
}
