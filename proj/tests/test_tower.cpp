#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "expmapkit/tower.hpp"

using namespace expmapkit;

TEST_CASE("iterated_exp matches direct evaluation") {
    CHECK(iterated_exp(0.0, 1).value() == Catch::Approx(1.0));
    CHECK(iterated_exp(1.0, 2).value() ==
          Catch::Approx(std::exp(std::exp(1.0))));
    CHECK(iterated_exp(2.0, 0).value() == Catch::Approx(2.0));
}

TEST_CASE("tower_cmp orders values across levels") {
    // e^{e^e} < e^{e^4}
    CHECK(tower_cmp(iterated_exp(1.0, 3), iterated_exp(4.0, 2)) ==
          Ordering::Less);
    CHECK(tower_cmp(TowerMagnitude::from_value(5.0),
                    TowerMagnitude::make(1, std::log(5.0))) == Ordering::Equal);
    CHECK(tower_cmp(iterated_exp(1.0, 2), TowerMagnitude::from_value(100.0)) ==
          Ordering::Less);
    CHECK(tower_cmp(iterated_exp(1.0, 3), iterated_exp(4.0, 2)) ==
          Ordering::Less);
}

TEST_CASE("iterated_log_need is the minimal clamped bound") {
    const double two_pi = 2.0 * std::acos(-1.0);
    CHECK(iterated_log_need(two_pi, 0) == Catch::Approx(two_pi));
    CHECK(iterated_log_need(3.0 * two_pi, 1) ==
          Catch::Approx(std::log(3.0 * two_pi)));
    CHECK(iterated_log_need(0.5, 3) == 0.0);
    CHECK_THROWS_AS(iterated_log_need(0.0, 1), InvalidInput);
}

TEST_CASE("canonical form is stable under renormalization") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> xs(0.0, 500.0);
    std::uniform_int_distribution<int> ns(0, 5);
    for (int i = 0; i < 1000; ++i) {
        TowerMagnitude t = iterated_exp(xs(rng), ns(rng));
        // Canonical band: level 0 with mantissa in [0, e), else [1, e).
        CHECK(t.mantissa() < kTowerBandHi);
        if (t.level() > 0) CHECK(t.mantissa() >= 1.0);
        TowerMagnitude again = TowerMagnitude::make(t.level(), t.mantissa());
        CHECK(again.level() == t.level());
        CHECK(again.mantissa() == t.mantissa());
    }
}

TEST_CASE("order embedding agrees with doubles in range") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xs(0.0, 250.0);
    std::uniform_int_distribution<int> ns(0, 3);
    for (int i = 0; i < 10000; ++i) {
        TowerMagnitude u = iterated_exp(xs(rng), ns(rng));
        TowerMagnitude v = iterated_exp(xs(rng), ns(rng));
        if (!u.representable() || !v.representable()) continue;
        double du = u.value(), dv = v.value();
        if (std::abs(du - dv) <= 1e-9 * std::max(1.0, std::max(du, dv)))
            continue;
        Ordering o = tower_cmp(u, v);
        CHECK(o == (du < dv ? Ordering::Less : Ordering::Greater));
    }
}

TEST_CASE("tower_cmp is transitive") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> ls(0, 3);
    std::uniform_real_distribution<double> ms(0.0, kTowerBandHi);
    auto rank = [](Ordering o) {
        return o == Ordering::Less ? -1 : (o == Ordering::Greater ? 1 : 0);
    };
    for (int i = 0; i < 10000; ++i) {
        TowerMagnitude a = TowerMagnitude::make(ls(rng), ms(rng));
        TowerMagnitude b = TowerMagnitude::make(ls(rng), ms(rng));
        TowerMagnitude c = TowerMagnitude::make(ls(rng), ms(rng));
        int ab = rank(tower_cmp(a, b));
        int bc = rank(tower_cmp(b, c));
        if (ab == bc && ab != 0) CHECK(rank(tower_cmp(a, c)) == ab);
        if (ab == 0 && bc == 0) CHECK(rank(tower_cmp(a, c)) == 0);
    }
}

TEST_CASE("tower_add and tower_scale are exact in range") {
    TowerMagnitude t = TowerMagnitude::from_value(100.0);
    CHECK(tower_add(t, 5.0).value() == Catch::Approx(105.0));
    CHECK(tower_add(t, -200.0).value() == 0.0);  // clamp at zero
    CHECK(tower_scale(t, 3.0).value() == Catch::Approx(300.0));

    // Out of double range: offsets vanish below the mantissa tolerance,
    // scaling folds into the exponent.
    TowerMagnitude big = iterated_exp(800.0, 1);
    CHECK(tower_cmp(tower_add(big, 1.0), big) == Ordering::Equal);
    TowerMagnitude scaled = tower_scale(big, 2.0);
    CHECK(tower_cmp(scaled, iterated_exp(800.0 + std::log(2.0), 1)) ==
          Ordering::Equal);
}

TEST_CASE("tower magnitude rejects bad inputs") {
    CHECK_THROWS_AS(TowerMagnitude::from_value(-1.0), InvalidInput);
    CHECK_THROWS_AS(TowerMagnitude::make(-1, 1.0), InvalidInput);
    CHECK_THROWS_AS(iterated_exp(1.0, -1), InvalidInput);
}
