#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "robinstab/special.hpp"

using namespace robinstab;

TEST_CASE("bessel_j series leading terms") {
    CHECK(bessel_j(0.0, 0.0) == 1.0);
    CHECK(bessel_j(1.0, 0.0) == 0.0);
    CHECK(bessel_j(2.5, 0.0) == 0.0);
    // J_{1/2}(pi) = sqrt(2/(pi x)) sin(pi) = 0
    CHECK(std::fabs(bessel_j(0.5, oracle::pi)) < 1e-12);
}

TEST_CASE("bessel_j matches the integral-representation oracle") {
    for (int nu : {0, 1, 2, 3}) {
        for (double x = 0.25; x <= 50.0; x += 0.83) {
            INFO("nu=" << nu << " x=" << x);
            CHECK(bessel_j(nu, x) == Catch::Approx(oracle::bessel_j_int(nu, x)).margin(1e-12));
        }
    }
}

TEST_CASE("first zero of J0") {
    // frozen from the series+bisection oracle
    const double frozen = 2.404825557695773;
    const double from_oracle = oracle::bisect(oracle::bessel_j0_series, 2.0, 3.0, 1e-13);
    CHECK(from_oracle == Catch::Approx(frozen).margin(1e-12));
    CHECK(std::fabs(bessel_j(0.0, frozen)) < 1e-10);
    CHECK(find_bracketed_root([](double x) { return bessel_j(0.0, x); }, 2.0, 3.0, 1e-12)
          == Catch::Approx(frozen).margin(1e-12));
}

TEST_CASE("bessel_j_prime basics") {
    // J_1(x) ~ x/2 near zero
    CHECK(bessel_j_prime(1.0, 0.0) == Catch::Approx(0.5).margin(1e-14));
    for (double x : {0.3, 1.7, 4.0, 11.0})
        CHECK(bessel_j_prime(0.0, x) == Catch::Approx(-bessel_j(1.0, x)).margin(1e-14));
    // first zero of J_1' via the (J0 - J2)/2 oracle, frozen
    const double frozen = 1.841183781340659;
    const double from_oracle = oracle::bisect(
        [](double x) {
            return 0.5 * (oracle::bessel_j_int(0, x) - oracle::bessel_j_int(2, x));
        },
        1.0, 3.0, 1e-13);
    CHECK(from_oracle == Catch::Approx(frozen).margin(1e-11));
    CHECK(std::fabs(bessel_j_prime(1.0, frozen)) < 1e-10);
}

TEST_CASE("bessel_i basics and series oracle") {
    CHECK(bessel_i(0.0, 0.0) == 1.0);
    CHECK(bessel_i(1.0, 0.0) == 0.0);
    // I_{1/2}(1) = sqrt(2/pi) sinh(1)
    CHECK(bessel_i(0.5, 1.0) == Catch::Approx(0.9376748882454876).margin(1e-12));
    const double i0 = oracle::bessel_i0_series(1.0);
    CHECK(i0 == Catch::Approx(1.2660658777520084).margin(1e-12));
    CHECK(bessel_i(0.0, 1.0) == Catch::Approx(i0).margin(1e-12));
    CHECK(bessel_i(0.0, 1.0) > 1.0);
}

TEST_CASE("recurrence consistency") {
    for (double nu : {1.0, 1.5, 2.0}) {
        for (double x = 0.1; x <= 30.0; x += 0.73) {
            const double lhs = bessel_j(nu - 1.0, x) + bessel_j(nu + 1.0, x) -
                               (2.0 * nu / x) * bessel_j(nu, x);
            INFO("nu=" << nu << " x=" << x);
            CHECK(std::fabs(lhs) < 1e-9);
        }
    }
}

TEST_CASE("half-integer closed forms") {
    for (double x = 0.1; x <= 20.0; x += 0.41) {
        INFO("x=" << x);
        CHECK(bessel_j(0.5, x) == Catch::Approx(oracle::bessel_j_half(0, x)).margin(1e-10));
        CHECK(bessel_j(1.5, x) == Catch::Approx(oracle::bessel_j_half(1, x)).margin(1e-10));
        const double i_half = std::sqrt(2.0 / (oracle::pi * x)) * std::sinh(x);
        // relative for I: the function grows like e^x
        CHECK(bessel_i(0.5, x) == Catch::Approx(i_half).epsilon(1e-10));
    }
}

TEST_CASE("derivative identity vs central differences") {
    const double step = 1e-5;
    for (double nu : {0.0, 1.0, 1.5, 2.0}) {
        for (double x : {0.5, 1.3, 2.9, 7.7, 16.0, 29.0}) {
            const double fd = (bessel_j(nu, x + step) - bessel_j(nu, x - step)) / (2 * step);
            INFO("nu=" << nu << " x=" << x);
            CHECK(bessel_j_prime(nu, x) == Catch::Approx(fd).margin(1e-6));
        }
    }
}

TEST_CASE("find_bracketed_root basics") {
    CHECK(find_bracketed_root([](double x) { return x - 1.0; }, 0.0, 2.0, 1e-12)
          == Catch::Approx(1.0).margin(1e-12));
    CHECK(find_bracketed_root([](double x) { return x * x - 2.0; }, 1.0, 2.0, 1e-12)
          == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
    CHECK_THROWS_AS(find_bracketed_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12),
                    BracketError);
    CHECK_THROWS_AS(find_bracketed_root([](double) { return 1.0; }, 0.0, 1.0, -1.0),
                    std::invalid_argument);
}

TEST_CASE("invalid arguments are rejected") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(bessel_j(0.0, nan), std::invalid_argument);
    CHECK_THROWS_AS(bessel_j(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_j(0.0, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_i(nan, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_j_prime(0.5, -1.0), std::invalid_argument);
}
