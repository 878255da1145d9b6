#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "expmapkit/core.hpp"

using namespace expmapkit;

TEST_CASE("step evaluates exp(z) + a") {
    CHECK(std::abs(step(Parameter(0.0, 0.0), Complex(0.0, 0.0)) -
                   Complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(step(Parameter(0.0, 0.0), Complex(0.0, kPi)) -
                   Complex(-1.0, 0.0)) < 1e-15);
    CHECK(std::abs(step(Parameter(-2.0, 0.0), Complex(0.0, 0.0)) -
                   Complex(-1.0, 0.0)) < 1e-15);
}

TEST_CASE("step signals overflow of exp(Re z)") {
    CHECK_THROWS_AS(step(Parameter(0.0, 0.0), Complex(800.0, 0.0)),
                    RangeExceeded);
}

TEST_CASE("orbit classifies fast real escape") {
    Orbit o = orbit(Parameter(0.0, 0.0), Complex(0.0, 0.0), 10, 50.0, 2);
    REQUIRE(o.status == OrbitStatus::EscapedAt);
    CHECK(o.escape_step <= 6);
}

TEST_CASE("orbit stays bounded in an attracting basin") {
    Orbit o = orbit(Parameter(-2.0, 0.0), Complex(-2.0, 0.0), 1000, 50.0, 2);
    CHECK(o.status == OrbitStatus::BoundedWithinBudget);
    // Oracle: fixed-point iteration q = e^q - 2 converges to q ~ -1.8414.
    CHECK(std::abs(o.points.back() - Complex(-1.8414056604369606, 0.0)) <
          1e-6);
}

TEST_CASE("orbit of i pi stays small for a few steps") {
    // exp(i pi) = -1, then 1/e, ...: the orbit crawls up the real axis and
    // only passes the threshold at step 5.
    Orbit o = orbit(Parameter(0.0, 0.0), Complex(0.0, kPi), 4, 50.0, 2);
    CHECK(o.status == OrbitStatus::BoundedWithinBudget);
    Orbit o5 = orbit(Parameter(0.0, 0.0), Complex(0.0, kPi), 5, 50.0, 2);
    CHECK(o5.status == OrbitStatus::EscapedAt);
    CHECK(o5.escape_step == 5);
}

TEST_CASE("orbit validates inputs") {
    Parameter a(0.0, 0.0);
    CHECK_THROWS_AS(orbit(a, Complex(0.0, 0.0), 0, 50.0, 2), InvalidInput);
    CHECK_THROWS_AS(orbit(a, Complex(0.0, 0.0), 10, 5.0, 2), InvalidInput);
    CHECK_THROWS_AS(
        orbit(a, Complex(std::numeric_limits<double>::quiet_NaN(), 0.0), 10,
              50.0, 2),
        InvalidInput);
}

TEST_CASE("inverse_branch picks the indexed preimage") {
    CHECK(std::abs(inverse_branch(Parameter(0.0, 0.0),
                                  Complex(std::exp(1.0), 0.0), 0) -
                   Complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(inverse_branch(Parameter(0.0, 0.0), Complex(1.0, 0.0), 1) -
                   Complex(0.0, kTwoPi)) < 1e-15);
    CHECK(std::abs(inverse_branch(Parameter(-2.0, 0.0), Complex(-1.0, 0.0), 0) -
                   Complex(0.0, 0.0)) < 1e-15);
    CHECK_THROWS_AS(
        inverse_branch(Parameter(1.0, 2.0), Complex(1.0, 2.0), 0),
        SingularValueHit);
}

TEST_CASE("step inverts inverse_branch on random samples") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> cs(-10.0, 10.0);
    std::uniform_int_distribution<int> ks(-5, 5);
    for (int i = 0; i < 10000; ++i) {
        Parameter a(cs(rng), cs(rng));
        Complex w(cs(rng), cs(rng));
        if (std::abs(w - a.a) < 1e-9) continue;
        Complex z = inverse_branch(a, w, ks(rng));
        CHECK(std::abs(step(a, z) - w) <= 1e-10 * (1.0 + std::abs(w)));
    }
}

TEST_CASE("real orbits escape when a > -1") {
    // e^x + a > x for a >= -1 + 0.01, so every real orbit escapes.
    for (double ar : {0.0, 1.0, -0.9}) {
        for (double x : {-5.0, 0.0, 3.0}) {
            Orbit o = orbit(Parameter(ar, 0.0), Complex(x, 0.0), 100, 50.0, 2);
            INFO("a=" << ar << " x=" << x);
            CHECK(o.status == OrbitStatus::EscapedAt);
        }
    }
}

TEST_CASE("principal_log lands in (-pi, pi]") {
    Complex l = principal_log(Complex(-1.0, 0.0));
    CHECK(l.imag() == Catch::Approx(kPi));
    CHECK(principal_log(Complex(std::exp(2.0), 0.0)).real() ==
          Catch::Approx(2.0));
}
