#include "doctest.h"

#include <cmath>
#include <random>

#include "ocvcap/curve.hpp"
#include "ocvcap/synth.hpp"

using namespace ocvcap;

namespace {

OCVCurve three_knots() {
    return build_curve({0.0, 0.5, 1.0}, {2.5, 3.6, 4.2});
}

// Random strictly monotone curve for property checks; slopes kept within
// [0.1, 10] V per unit SOC so inverse lookups stay well conditioned.
OCVCurve random_curve(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_dist(2, 30);
    std::uniform_real_distribution<double> gap(0.01, 0.1);
    std::uniform_real_distribution<double> slope(0.1, 10.0);
    const int n = n_dist(rng);
    std::vector<double> soc{0.0}, ocv{2.5};
    for (int i = 1; i < n; ++i) {
        const double dz = gap(rng);
        if (soc.back() + dz > 1.0)
            break;
        soc.push_back(soc.back() + dz);
        ocv.push_back(ocv.back() + slope(rng) * dz);
    }
    if (soc.size() < 2) {
        soc.push_back(1.0);
        ocv.push_back(ocv.back() + 0.5);
    }
    return build_curve(std::move(soc), std::move(ocv));
}

} // namespace

TEST_CASE("build_curve accepts a minimal monotone table") {
    const auto curve = three_knots();
    CHECK(curve.size() == 3);
    CHECK(curve.soc_range().lo == 0.0);
    CHECK(curve.soc_range().hi == 1.0);
    CHECK(curve.min_ocv() == 2.5);
    CHECK(curve.max_ocv() == 4.2);
}

TEST_CASE("build_curve rejects duplicate SOC knots") {
    CHECK_THROWS_AS(build_curve({0.0, 0.5, 0.5, 1.0}, {2.5, 3.0, 3.6, 4.2}), NonMonotonic);
}

TEST_CASE("build_curve rejects non-increasing OCV") {
    CHECK_THROWS_AS(build_curve({0.0, 0.5, 1.0}, {2.5, 3.7, 3.6}), NonMonotonic);
}

TEST_CASE("build_curve sorts by SOC, so reversed input builds the same curve") {
    const auto sorted = three_knots();
    const auto reversed = build_curve({1.0, 0.5, 0.0}, {4.2, 3.6, 2.5});
    CHECK(reversed.soc() == sorted.soc());
    CHECK(reversed.ocv() == sorted.ocv());
}

TEST_CASE("build_curve length and finiteness errors") {
    CHECK_THROWS_AS(build_curve({0.0, 1.0}, {2.5}), LengthMismatch);
    CHECK_THROWS_AS(build_curve({0.0}, {2.5}), LengthMismatch);
    CHECK_THROWS_AS(build_curve({0.0, 1.0}, {2.5, std::nan("")}), NonFinite);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(build_curve({0.0, inf}, {2.5, 4.2}), NonFinite);
}

TEST_CASE("ocv_at is exact at knots and linear between them") {
    const auto curve = three_knots();
    CHECK(curve.ocv_at(0.5) == 3.6);
    CHECK(curve.ocv_at(0.25) == doctest::Approx(3.05).epsilon(1e-15)); // midpoint of 2.5..3.6
    CHECK_THROWS_AS(curve.ocv_at(1.01), OutOfRange);
    CHECK_THROWS_AS(curve.ocv_at(-0.01), OutOfRange);
}

TEST_CASE("soc_at inverts ocv_at") {
    const auto curve = three_knots();
    CHECK(curve.soc_at(3.6) == 0.5);
    CHECK(curve.soc_at(3.05) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(curve.soc_at(2.0), OutOfRange); // below the lower cut-off
    CHECK_THROWS_AS(curve.soc_at(4.3), OutOfRange);
}

TEST_CASE("knot exactness holds on every sample of the reference curve") {
    const auto curve = reference_nominal_curve();
    for (std::size_t i = 0; i < curve.size(); ++i)
        CHECK(curve.ocv_at(curve.soc()[i]) == curve.ocv()[i]);
}

TEST_CASE("interpolation round trip: soc -> ocv -> soc within 1e-12") {
    std::mt19937_64 rng(7);
    for (int c = 0; c < 20; ++c) {
        const auto curve = random_curve(rng);
        const auto range = curve.soc_range();
        std::uniform_real_distribution<double> z_dist(range.lo, range.hi);
        for (int i = 0; i < 200; ++i) {
            const double z = z_dist(rng);
            CHECK(std::abs(curve.soc_at(curve.ocv_at(z)) - z) <= 1e-12);
        }
    }
}

TEST_CASE("interpolant is strictly increasing") {
    std::mt19937_64 rng(11);
    const auto curve = reference_nominal_curve();
    std::uniform_real_distribution<double> z_dist(0.0, 1.0 - 1e-7);
    for (int i = 0; i < 500; ++i) {
        const double z1 = z_dist(rng);
        const double z2 = z1 + 1e-7;
        CHECK(curve.ocv_at(z1) < curve.ocv_at(z2));
    }
}

TEST_CASE("enforce_monotone pools the violating pair and splits the tie") {
    // Hand-run pool-adjacent-violators: the (3.61, 3.60) pool averages to
    // 3.605 for both entries, then the tie splits by 1e-9 V.
    const std::vector<double> soc{0.0, 0.4, 0.6, 1.0};
    const auto [s, v] = enforce_monotone(soc, {2.5, 3.61, 3.60, 4.2});
    CHECK(s == soc);
    REQUIRE(v.size() == 4);
    CHECK(v[0] == 2.5);
    CHECK(v[1] == doctest::Approx((3.61 + 3.60) / 2.0).epsilon(1e-15));
    CHECK(v[2] == doctest::Approx((3.61 + 3.60) / 2.0 + 1e-9).epsilon(1e-15));
    CHECK(v[3] == 4.2);
    CHECK_NOTHROW(build_curve(s, v));
}

TEST_CASE("enforce_monotone is a no-op on monotone input") {
    const std::vector<double> soc{0.0, 0.5, 1.0};
    const std::vector<double> ocv{2.5, 3.6, 4.2};
    const auto [s, v] = enforce_monotone(soc, ocv);
    CHECK(s == soc);
    CHECK(v == ocv);
}

TEST_CASE("enforce_monotone splits a constant plateau into 1e-9 steps") {
    const auto [s, v] = enforce_monotone({0.0, 0.5, 1.0}, {3.0, 3.0, 3.0});
    CHECK(s.size() == 3);
    CHECK(v[0] == 3.0);
    CHECK(v[1] == 3.0 + 1e-9);
    CHECK(v[2] == doctest::Approx(3.0 + 2e-9).epsilon(1e-15));
}

TEST_CASE("enforce_monotone is idempotent") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> soc, ocv;
        for (int i = 0; i <= 20; ++i) {
            soc.push_back(i / 20.0);
            ocv.push_back(2.5 + 1.7 * i / 20.0 + noise(rng));
        }
        const auto [s1, v1] = enforce_monotone(soc, ocv);
        const auto [s2, v2] = enforce_monotone(s1, v1);
        CHECK(s2 == s1);
        CHECK(v2 == v1);
        for (std::size_t i = 1; i < v1.size(); ++i)
            CHECK(v1[i] > v1[i - 1]);
    }
}
