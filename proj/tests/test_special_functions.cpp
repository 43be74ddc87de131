#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "thermalink/special_functions.hpp"

#include <cmath>

using namespace thermalink;

TEST_CASE("exp1 against quadrature oracle") {
    for (double z : {1e-5, 1e-3, 0.03, 0.2, 0.5, 0.999, 1.0, 1.001, 2.0, 5.0, 10.0, 30.0}) {
        const double oracle = testing::exp1_quadrature(z);
        CHECK(std::abs(exp1(z) - oracle) < 1e-12 * std::abs(oracle) + 1e-300);
    }
}

TEST_CASE("scaled form matches exp(z) E1(z) and stays finite at large z") {
    for (double z : {0.1, 1.0, 7.0, 50.0}) {
        CHECK(exp1_scaled(z) == doctest::Approx(std::exp(z) * exp1(z)).epsilon(1e-13));
    }
    // large-z asymptotics: e^z E1(z) = (1 - 1/z + 2/z^2 - 6/z^3 + 24/z^4 + ...)/z
    for (double z : {1e3, 1e5, 1e7}) {
        const double s = exp1_scaled(z);
        const double asym =
            (1.0 - 1.0 / z + 2.0 / (z * z) - 6.0 / (z * z * z) + 24.0 / (z * z * z * z)) / z;
        CHECK(std::abs(s - asym) < 1e-12 * asym);
    }
}

TEST_CASE("upsilon frozen value at x = 1/8") {
    // z = 1, Upsilon = e * E1(1); frozen from the quadrature oracle
    const double oracle = std::exp(1.0) * testing::exp1_quadrature(1.0);
    CHECK(oracle == doctest::Approx(0.59634736232319407).epsilon(1e-12));
    CHECK(upsilon(0.125) == doctest::Approx(0.59634736232319407).epsilon(1e-12));
}

TEST_CASE("upsilon limits") {
    // x -> 0+: Upsilon = 1 - 8x + O(x^2)
    for (double x : {1e-5, 1e-4, 1e-3}) {
        const double u = upsilon(x);
        CHECK(std::abs((1.0 - u) / (8.0 * x) - 1.0) < 20.0 * x + 1e-10);
    }
    // x -> inf: Upsilon(x) = (ln(8x) - gamma_E + O(z ln z)) / (8x), so the
    // saturation 1 - Upsilon -> 1 carries a logarithmic factor on top of the
    // bare 1/(8x) scaling.
    constexpr double euler = 0.57721566490153286;
    for (double x : {10.0, 1e3, 1e6}) {
        const double u = upsilon(x);
        CHECK(std::abs(u * 8.0 * x - (std::log(8.0 * x) - euler)) < 3.0 * std::log(8.0 * x) / x);
        CHECK(1.0 - u > 1.0 - 2.0 * std::log(8.0 * x) / (8.0 * x));
    }
    // frozen value at the flux the saturation discussion refers to; the
    // quadrature oracle gives the same digits
    const double z10 = 1.0 / 80.0;
    const double oracle10 = 1.0 - z10 * std::exp(z10) * testing::exp1_quadrature(z10);
    CHECK(oracle10 == doctest::Approx(0.951683907667623).epsilon(1e-12));
    CHECK(1.0 - upsilon(10.0) == doctest::Approx(0.951683907667623).epsilon(1e-12));
    CHECK(upsilon(1e8) < 1e-5);
}

TEST_CASE("upsilon is strictly decreasing with values in (0,1)") {
    double prev = 1.0;
    for (int k = 0; k <= 80; ++k) {
        const double x = std::pow(10.0, -4.0 + 8.0 * k / 80.0);
        const double u = upsilon(x);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        CHECK(u < prev);
        prev = u;
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(upsilon(0.0), std::domain_error);
    CHECK_THROWS_AS(upsilon(-1.0), std::domain_error);
    CHECK_THROWS_AS(exp1(0.0), std::domain_error);
}
