#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "chnnet/stats.hpp"

using chn::SampleSet;
using chn::TTestResult;

TEST_CASE("mean_std textbook cases") {
    auto [m1, s1] = chn::mean_std(SampleSet{{5, 5, 5}, 1});
    CHECK(m1 == 5.0);
    CHECK(s1 == 0.0);

    auto [m2, s2] = chn::mean_std(SampleSet{{1, 2, 3}, 1});
    CHECK(m2 == doctest::Approx(2.0));
    CHECK(s2 == doctest::Approx(1.0));

    // population std (ddof = 0) of the same data
    auto [m3, s3] = chn::mean_std(SampleSet{{1, 2, 3}, 0});
    CHECK(m3 == doctest::Approx(2.0));
    CHECK(s3 == doctest::Approx(std::sqrt(2.0 / 3.0)));

    CHECK_THROWS_AS(chn::mean_std(SampleSet{{}, 1}), std::invalid_argument);
    CHECK_THROWS_AS(chn::mean_std(SampleSet{{4.0}, 1}), std::invalid_argument);
}

TEST_CASE("welch_t identical samples") {
    const SampleSet a{{1, 2, 3}, 1};
    const TTestResult r = chn::welch_t(a, a);
    CHECK(r.t_statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("welch_t closed form for a shifted sample") {
    // var = 1 on both sides, n = 3: t = -10 / sqrt(2/3), df = 4
    const SampleSet a{{1, 2, 3}, 1};
    const SampleSet b{{11, 12, 13}, 1};
    const TTestResult r = chn::welch_t(a, b);
    CHECK(std::abs(r.t_statistic - (-10.0 / std::sqrt(2.0 / 3.0))) < 1e-9);
    CHECK(r.degrees_of_freedom == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.p_value < 0.01);
    CHECK(r.two_sided);
}

TEST_CASE("welch_t sign convention and antisymmetry") {
    const SampleSet lower{{94.3, 94.5, 94.6}, 1};
    const SampleSet higher{{95.5, 95.6, 95.8}, 1};
    const TTestResult r = chn::welch_t(lower, higher);
    CHECK(r.t_statistic < 0.0);  // first sample's mean is smaller

    const TTestResult rev = chn::welch_t(higher, lower);
    CHECK(rev.t_statistic == doctest::Approx(-r.t_statistic).epsilon(1e-12));
    CHECK(rev.p_value == doctest::Approx(r.p_value).epsilon(1e-12));
}

TEST_CASE("welch_t translation and common-scaling invariance") {
    const SampleSet a{{3.1, 2.4, 5.8, 4.0}, 1};
    const SampleSet b{{4.9, 5.5, 6.1}, 1};
    const TTestResult r1 = chn::welch_t(a, b);

    SampleSet a_shift = a;
    SampleSet b_shift = b;
    for (double& v : a_shift.values) v += 123.25;
    for (double& v : b_shift.values) v += 123.25;
    const TTestResult r2 = chn::welch_t(a_shift, b_shift);
    CHECK(r1.t_statistic == doctest::Approx(r2.t_statistic).epsilon(1e-9));
    CHECK(r1.p_value == doctest::Approx(r2.p_value).epsilon(1e-9));

    // scaling both samples by the same positive factor cancels out of t and df
    SampleSet a_scale = a;
    SampleSet b_scale = b;
    for (double& v : a_scale.values) v *= 7.5;
    for (double& v : b_scale.values) v *= 7.5;
    const TTestResult r3 = chn::welch_t(a_scale, b_scale);
    CHECK(r1.t_statistic == doctest::Approx(r3.t_statistic).epsilon(1e-9));
    CHECK(r1.degrees_of_freedom == doctest::Approx(r3.degrees_of_freedom).epsilon(1e-9));
    CHECK(r1.p_value == doctest::Approx(r3.p_value).epsilon(1e-9));
}

TEST_CASE("welch_t degenerate zero-variance cases") {
    const TTestResult equal = chn::welch_t(SampleSet{{2, 2, 2}, 1}, SampleSet{{2, 2}, 1});
    CHECK(equal.t_statistic == 0.0);
    CHECK(equal.p_value == 1.0);

    const TTestResult apart = chn::welch_t(SampleSet{{2, 2}, 1}, SampleSet{{3, 3}, 1});
    CHECK(std::isinf(apart.t_statistic));
    CHECK(apart.t_statistic < 0.0);
    CHECK(apart.p_value == 0.0);

    CHECK_THROWS_AS(chn::welch_t(SampleSet{{1.0}, 1}, SampleSet{{1, 2}, 1}),
                    std::invalid_argument);
}

TEST_CASE("student_t_cdf symmetry point and Cauchy closed form") {
    for (double df : {0.5, 1.0, 3.0, 10.0, 100.0}) {
        CHECK(chn::student_t_cdf(0.0, df) == doctest::Approx(0.5).epsilon(1e-12));
    }
    // df = 1 is Cauchy: CDF(t) = 1/2 + atan(t)/pi
    for (double t : {-5.0, -1.0, -0.3, 0.7, 1.0, 4.2}) {
        const double expected = 0.5 + std::atan(t) / M_PI;
        CHECK(chn::student_t_cdf(t, 1.0) == doctest::Approx(expected).epsilon(1e-10));
    }
    CHECK(chn::student_t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-10));
}

TEST_CASE("student_t_cdf matches the classic 95% critical value") {
    CHECK(std::abs(chn::student_t_cdf(2.776, 4.0) - 0.975) < 5e-4);
}

TEST_CASE("student_t_cdf monotonicity and reflection") {
    for (double df : {1.0, 2.5, 4.0, 30.0}) {
        double prev = 0.0;
        for (double t = -8.0; t <= 8.0; t += 0.25) {
            const double c = chn::student_t_cdf(t, df);
            CHECK(c >= prev);
            prev = c;
            CHECK(std::abs(chn::student_t_cdf(-t, df) + c - 1.0) < 1e-10);
        }
    }
    CHECK(chn::student_t_cdf(std::numeric_limits<double>::infinity(), 4.0) == 1.0);
    CHECK_THROWS_AS(chn::student_t_cdf(1.0, 0.0), std::invalid_argument);
}
