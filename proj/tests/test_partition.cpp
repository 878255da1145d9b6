#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "expmapkit/partition.hpp"

using namespace expmapkit;

namespace {

// Synthetic polyline along the positive real axis (the singular ray of the
// standard map), without running the tracer.
RayPolyline real_axis_polyline() {
    RayPolyline line{ExternalAddress::constant(0), {}};
    for (int i = 0; i <= 60; ++i) {
        double x = 1e-6 + 0.5 * i;
        line.samples.push_back(RayPoint{ExternalAddress::constant(0), x,
                                        Complex(x, 0.0), 8, 0.0,
                                        ResidualEstimate{}});
    }
    return line;
}

Partition standard_partition(int K = 4) {
    return build_partition(Parameter(0.0, 0.0), real_axis_polyline(), K, 0.0);
}

Itinerary from_entries(const std::vector<long long>& ks) {
    Itinerary it;
    for (long long k : ks) it.entries.push_back(StripIndex{k, false, k});
    return it;
}

}  // namespace

TEST_CASE("partition of the standard map has horizontal boundaries") {
    Partition p = standard_partition(2);
    CHECK(p.M() == Catch::Approx(kTwoPi));
    CHECK(p.alpha() == Catch::Approx(std::log(3.0 * (0.0 + kTwoPi + 2.0))));
    auto eta0 = p.curve(0);
    auto eta1 = p.curve(1);
    REQUIRE(eta0.size() == eta1.size());
    for (std::size_t i = 0; i < eta0.size(); ++i) {
        CHECK(std::abs(eta0[i].imag()) < 1e-9);
        CHECK(std::abs(eta1[i] - eta0[i] - Complex(0.0, kTwoPi)) < 1e-9);
    }
    CHECK_THROWS_AS(p.curve(5), InvalidInput);
}

TEST_CASE("partition built from a traced ray keeps ordered curves") {
    Parameter a1(1.0, 0.0);
    Partition p = build_partition(a1, singular_ray(a1), 3);
    CHECK(std::isfinite(p.M()));
    CHECK(p.M() >= 0.0);
    double re = 0.5 * (p.traced_re_min() + p.traced_re_max());
    for (int k = -3; k < 3; ++k)
        CHECK(p.boundary_im(re) + kTwoPi * k <
              p.boundary_im(re) + kTwoPi * (k + 1));
}

TEST_CASE("strip_index follows the labeling convention") {
    Partition p = standard_partition();
    StripIndex s = p.strip_index(Complex(1.0, kPi));
    CHECK_FALSE(s.ambiguous);
    CHECK(s.k == 0);

    s = p.strip_index(Complex(1.0, 5.0 * kPi));
    CHECK_FALSE(s.ambiguous);
    CHECK(s.k == 2);

    s = p.strip_index(Complex(1.0, 0.0), 0.01);
    CHECK(s.ambiguous);
    CHECK(((s.k == 0 && s.k_other == -1) || (s.k == -1 && s.k_other == 0)));
}

TEST_CASE("strip_index handles range edges") {
    Partition p = standard_partition();
    CHECK_THROWS_AS(p.strip_index(Complex(p.traced_re_min() - 5.0, 1.0)),
                    OutOfTracedRange);
    // Right of the traced range the horizontal asymptote rule applies.
    StripIndex s = p.strip_index(Complex(p.traced_re_max() + 100.0, kPi));
    CHECK(s.k == 0);
}

TEST_CASE("itinerary of a point in the first strip") {
    Partition p = standard_partition();
    Itinerary it = itinerary(p, Complex(1.0, kPi), 1);
    REQUIRE(it.entries.size() == 1);
    CHECK(it.entries[0].k == 0);
    CHECK_FALSE(it.entries[0].ambiguous);
}

TEST_CASE("real orbits sit on the strip boundary") {
    Partition p = standard_partition();
    Itinerary it = itinerary(p, Complex(0.0, 0.0), 3);
    REQUIRE(it.entries.size() == 3);
    for (const auto& e : it.entries) {
        CHECK(e.ambiguous);
        CHECK(std::abs(e.k - e.k_other) == 1);
    }
}

TEST_CASE("ray points carry their address as itinerary") {
    Parameter a0(0.0, 0.0);
    Partition p = standard_partition();
    Complex z =
        trace_ray(a0, ExternalAddress::constant(1), 3.0, default_trace_depth(3.0))
            .z;
    Itinerary it = itinerary(p, z, 5);
    for (const auto& e : it.entries)
        if (!e.ambiguous) CHECK(e.k == 1);
}

TEST_CASE("kneading sequence is the itinerary of the singular value") {
    Partition p0 = standard_partition();
    Itinerary k0 = kneading(p0, 4);
    for (const auto& e : k0.entries) CHECK(e.ambiguous);

    Parameter a1(1.0, 0.0);
    Partition p1 = build_partition(a1, singular_ray(a1), 3);
    Itinerary k1 = kneading(p1, 4);
    for (const auto& e : k1.entries)
        if (!e.ambiguous) CHECK(e.k == 0);
}

TEST_CASE("minimal_exp_bound on known prefixes") {
    CHECK(minimal_exp_bound(from_entries({0, 0, 0})) == 0.0);
    CHECK(minimal_exp_bound(from_entries({1})) == Catch::Approx(kTwoPi));
    CHECK(minimal_exp_bound(from_entries({0, 3})) ==
          Catch::Approx(std::log(6.0 * kPi)));
    CHECK_THROWS_AS(minimal_exp_bound(Itinerary{}), InvalidInput);
}

TEST_CASE("minimal_exp_bound never decreases under extension") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<long long> ks(-50, 50);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<long long> entries;
        double prev = 0.0;
        for (int j = 0; j < 12; ++j) {
            entries.push_back(ks(rng));
            double x = minimal_exp_bound(from_entries(entries));
            CHECK(x >= prev);
            prev = x;
        }
    }
}

TEST_CASE("elementary chain on reference points") {
    auto r = check_elementary(Parameter(0.0, 0.0), 1.0, Complex(0.0, 0.0));
    CHECK(r.ok);
    CHECK(r.alpha == Catch::Approx(std::log(9.0)));
    // exp(|z| + alpha) = 9 against |f(z)| + M + alpha = 1 + 1 + ln 9.
    CHECK(r.slack == Catch::Approx(9.0 - (1.0 + 1.0 + std::log(9.0))));

    CHECK(check_elementary(Parameter(0.0, 0.0), 0.0, Complex(0.0, 0.0)).ok);
}

TEST_CASE("elementary chain switches to the log-domain path when large") {
    auto r = check_elementary(Parameter(2.0, 1.0), 5.0, Complex(750.0, 100.0));
    CHECK(r.tower_path);
    CHECK(r.ok);
    CHECK(r.slack > 0.0);
}

TEST_CASE("periodicity check on finite prefixes") {
    CHECK(periodicity_check(from_entries({0, 0, 0, 0, 0, 0}), 2) == 1);
    CHECK(periodicity_check(from_entries({0, 1, 0, 1, 0, 1}), 2) == 2);
    CHECK_FALSE(
        periodicity_check(from_entries({0, 1, 2, 4, 8, 16, 32, 64, 128, 256,
                                        512, 1024, 2048, 4096, 8192}),
                          5)
            .has_value());
    CHECK_THROWS_AS(periodicity_check(from_entries({0, 1}), 2),
                    PrefixTooShort);
}

TEST_CASE("ambiguous entries match either candidate period") {
    Itinerary it = from_entries({0, 1, 0, 1, 0, 1});
    it.entries[2] = StripIndex{1, true, 0};  // boundary case still fits p=2
    CHECK(periodicity_check(it, 2) == 2);
}

TEST_CASE("strip_index is 2 pi i equivariant") {
    Partition p = standard_partition();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> res(p.traced_re_min() + 0.5, 25.0);
    std::uniform_real_distribution<double> ims(-20.0, 20.0);
    std::uniform_int_distribution<long long> ks(-3, 3);
    for (int i = 0; i < 2000; ++i) {
        Complex z(res(rng), ims(rng));
        StripIndex base = p.strip_index(z);
        if (base.ambiguous) continue;
        long long k = ks(rng);
        StripIndex moved = p.strip_index(z + Complex(0.0, kTwoPi * k));
        CHECK_FALSE(moved.ambiguous);
        CHECK(moved.k == base.k + k);
    }
}

TEST_CASE("imaginary parts track the strip index within M") {
    Parameter a0(0.0, 0.0);
    Partition p = standard_partition();
    for (const char* spec : {"const:1", "per:2,-1"}) {
        ExternalAddress s = ExternalAddress::parse(spec);
        Complex z = trace_ray(a0, s, 2.0, default_trace_depth(2.0)).z;
        Complex w = z;
        for (int j = 0; j < 4; ++j) {
            if (w.real() >= p.R() && w.real() < 200.0) {
                StripIndex u = p.strip_index(w);
                CHECK(std::abs(w.imag() - kTwoPi * u.k) <= p.M() + 1e-6);
            }
            if (w.real() > kExpOverflowRe) break;
            w = step(a0, w);
        }
    }
}
