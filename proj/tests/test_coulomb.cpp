#include "doctest.h"

#include <cmath>
#include <random>

#include "ocvcap/coulomb.hpp"

using namespace ocvcap;

TEST_CASE("unit discharge: 1 A for one hour withdraws 1 Ah") {
    const auto q = integrate_discharge({0.0, 3600.0}, {-1.0, -1.0});
    REQUIRE(q.size() == 2);
    CHECK(q[0] == 0.0);
    CHECK(q[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("charging carries the positive sign, so q_dc goes negative") {
    const auto q = integrate_discharge({0.0, 1800.0}, {2.0, 2.0});
    CHECK(q[1] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("trapezoid rule on a ramp: (1+3)/2 over one hour gives 2 Ah") {
    const auto q = integrate_discharge({0.0, 3600.0}, {-1.0, -3.0});
    CHECK(q[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("integrate_discharge rejects bad inputs") {
    CHECK_THROWS_AS(integrate_discharge({0.0, 1.0, 1.0}, {0.0, 0.0, 0.0}), NonMonotonicTime);
    CHECK_THROWS_AS(integrate_discharge({0.0, 2.0, 1.0}, {0.0, 0.0, 0.0}), NonMonotonicTime);
    CHECK_THROWS_AS(integrate_discharge({0.0, 1.0}, {0.0}), LengthMismatch);
}

TEST_CASE("integration is additive across a split point") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dt(0.5, 100.0);
    std::uniform_real_distribution<double> amps(-5.0, 5.0);
    std::vector<double> t{0.0}, i{amps(rng)};
    for (int k = 0; k < 50; ++k) {
        t.push_back(t.back() + dt(rng));
        i.push_back(amps(rng));
    }
    const auto q_full = integrate_discharge(t, i);

    const std::size_t split = 20;
    const std::vector<double> t2(t.begin() + split, t.end());
    const std::vector<double> i2(i.begin() + split, i.end());
    const auto q_tail = integrate_discharge(t2, i2);
    for (std::size_t k = 0; k < t2.size(); ++k)
        CHECK(q_full[split + k] ==
              doctest::Approx(q_full[split] + q_tail[k]).epsilon(1e-12));
}

TEST_CASE("integration is linear in the current") {
    const std::vector<double> t{0.0, 10.0, 40.0, 100.0};
    const std::vector<double> i{-1.0, -2.5, 0.5, -4.0};
    std::vector<double> i_scaled(i.size());
    for (std::size_t k = 0; k < i.size(); ++k)
        i_scaled[k] = 3.0 * i[k];
    const auto q = integrate_discharge(t, i);
    const auto q3 = integrate_discharge(t, i_scaled);
    for (std::size_t k = 0; k < q.size(); ++k)
        CHECK(q3[k] == doctest::Approx(3.0 * q[k]).epsilon(1e-15));
}

TEST_CASE("zero current integrates to zero capacity") {
    const auto q = integrate_discharge({0.0, 5.0, 11.0, 300.0}, {0.0, 0.0, 0.0, 0.0});
    for (double x : q)
        CHECK(x == 0.0);
}

TEST_CASE("soc_from_qdc arithmetic") {
    CHECK(soc_from_qdc(1.0, 1.0, 4.85) == doctest::Approx(0.7938144329896907).epsilon(1e-15));
    CHECK(soc_from_qdc(0.0, 0.8, 4.85) == 0.8);
    CHECK(soc_from_qdc(4.85, 1.0, 4.85) == doctest::Approx(0.0));
    CHECK_THROWS_AS(soc_from_qdc(1.0, 1.0, 0.0), NonPositiveCapacity);
    CHECK_THROWS_AS(soc_from_qdc(1.0, 1.0, -2.0), NonPositiveCapacity);
}

TEST_CASE("soc_from_qdc is affine and unclamped") {
    // strictly decreasing in q_dc, and deliberately allowed outside [0, 1]
    CHECK(soc_from_qdc(6.0, 1.0, 4.85) < 0.0);
    CHECK(soc_from_qdc(-1.0, 1.0, 4.85) > 1.0);
    const double a = soc_from_qdc(1.0, 0.9, 4.85);
    const double b = soc_from_qdc(2.0, 0.9, 4.85);
    const double c = soc_from_qdc(3.0, 0.9, 4.85);
    CHECK(b - a == doctest::Approx(c - b).epsilon(1e-12));
    CHECK(b < a);
}

TEST_CASE("resample_trace keeps every stride-th sample plus the last") {
    std::vector<double> t, i;
    for (int k = 0; k <= 10; ++k) {
        t.push_back(60.0 * k);
        i.push_back(-1.0 - 0.1 * k);
    }
    const auto trace = make_trace(t, i);

    SUBCASE("stride 1 is the identity") {
        const auto same = resample_trace(trace, 1);
        CHECK(same.t == trace.t);
        CHECK(same.q_dc == trace.q_dc);
    }

    SUBCASE("stride 5 on 11 samples keeps {0, 5, 10}") {
        const auto thin = resample_trace(trace, 5);
        REQUIRE(thin.size() == 3);
        CHECK(thin.t == std::vector<double>{0.0, 300.0, 600.0});
    }

    SUBCASE("stride 4 keeps {0, 4, 8} and appends the last sample") {
        const auto thin = resample_trace(trace, 4);
        REQUIRE(thin.size() == 4);
        CHECK(thin.t == std::vector<double>{0.0, 240.0, 480.0, 600.0});
    }

    SUBCASE("q_dc at kept indices equals the full-resolution integral") {
        const auto thin = resample_trace(trace, 3);
        CHECK(thin.q_dc.front() == trace.q_dc[0]);
        CHECK(thin.q_dc[1] == trace.q_dc[3]);
        CHECK(thin.q_dc[2] == trace.q_dc[6]);
        CHECK(thin.q_dc.back() == trace.q_dc[10]);
    }
}

TEST_CASE("make_trace validates aligned OCV samples") {
    CHECK_THROWS_AS(make_trace({0.0, 1.0}, {-1.0, -1.0}, {3.5}), LengthMismatch);
    const auto trace = make_trace({0.0, 1.0}, {-1.0, -1.0}, {3.5, 3.4});
    CHECK(trace.has_ocv());
}
