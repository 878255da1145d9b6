#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "expmapkit/core.hpp"
#include "expmapkit/partition.hpp"
#include "expmapkit/probe.hpp"
#include "expmapkit/ray.hpp"
#include "expmapkit/tower.hpp"

namespace expmapkit {

struct SuiteResult {
    std::string name;
    std::uint64_t samples = 0;
    std::uint64_t violations = 0;
    double worst_slack = std::numeric_limits<double>::infinity();
    bool pass = false;
};

/// Seeded sampling of the elementary inequality chain over
/// |z| <= 30, |a| <= 5, M in {0, 1, 5}.
inline SuiteResult verify_elementary(std::uint64_t seed, std::uint64_t n) {
    SuiteResult r{"elementary", n, 0,
                  std::numeric_limits<double>::infinity(), false};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> zc(-30.0, 30.0), ac(-5.0, 5.0);
    std::uniform_int_distribution<int> mi(0, 2);
    const double ms[] = {0.0, 1.0, 5.0};
    for (std::uint64_t i = 0; i < n; ++i) {
        Complex z(zc(rng), zc(rng));
        while (std::abs(z) > 30.0) z = Complex(zc(rng), zc(rng));
        Complex a(ac(rng), ac(rng));
        while (std::abs(a) > 5.0) a = Complex(ac(rng), ac(rng));
        auto rep = check_elementary(Parameter(a), ms[mi(rng)], z);
        if (!rep.ok) ++r.violations;
        r.worst_slack = std::min(r.worst_slack, rep.slack);
    }
    r.pass = r.violations == 0 && r.worst_slack > 0.0;
    return r;
}

/// Pullback sandwich on real-ray anchors z = x0 for a = 0.
inline SuiteResult verify_sandwich(int n = 4) {
    SuiteResult r{"sandwich", 0, 0, std::numeric_limits<double>::infinity(),
                  false};
    Parameter a0(0.0, 0.0);
    for (double x0 : {1.0, 2.0, 3.0}) {
        auto rep = sandwich_check(a0, Complex(x0, 0.0), x0, n);
        for (const auto& s : rep.steps) {
            ++r.samples;
            if (!s.ok) ++r.violations;
            r.worst_slack =
                std::min({r.worst_slack, s.lower_slack, s.upper_slack});
        }
    }
    r.pass = r.violations == 0;
    return r;
}

namespace detail {

inline Partition reference_partition_a0(int K = 4, double R = 0.0) {
    Parameter a0(0.0, 0.0);
    SingularRayBudget b;
    b.t_hi = 30.0;
    b.count = 80;
    return build_partition(a0, singular_ray(a0, b), K, R);
}

// Itinerary entry magnitudes for a traced ray point: numeric strip indices
// while the orbit is representable, continued by the address entries (the
// forward orbit of a point on ray (s, t) stays on ray (sigma^j s, F^j(t))).
// A point on the boundary has two itineraries differing by 1 in every entry,
// and it is exponentially bounded iff one of them is, so ambiguous entries
// take the smaller magnitude. Continuation entries take |s_j| + 1: a ray
// with a negative entry approaches its asymptote Im = 2 pi s_j from below
// and sits in strip s_j - 1, so |s_j| + 1 covers either side.
inline std::vector<double> ray_entry_magnitudes(const Partition& p,
                                                const RayPoint& pt, int m) {
    Itinerary it = itinerary(p, pt.z, m);
    std::vector<double> out;
    for (std::size_t j = 0; j < static_cast<std::size_t>(m); ++j) {
        if (j < it.entries.size()) {
            const StripIndex& e = it.entries[j];
            long long mag = e.ambiguous
                                ? std::min(std::llabs(e.k), std::llabs(e.k_other))
                                : std::llabs(e.k);
            out.push_back(static_cast<double>(mag));
        } else {
            out.push_back(std::abs(
                static_cast<double>(pt.address.entry(j))) + 1.0);
        }
    }
    return out;
}

}  // namespace detail

/// Exponentially-bounded-itinerary suite: traced ray points for the a = 0
/// partition, prefix length 15, 2 pi |u_j| <= exp^j(|z| + alpha) compared in
/// tower form.
inline SuiteResult verify_exp_bound(int points_per_address = 10,
                                    int prefix_len = 15) {
    SuiteResult r{"expbound", 0, 0, std::numeric_limits<double>::infinity(),
                  false};
    Parameter a0(0.0, 0.0);
    Partition part = detail::reference_partition_a0();
    // First entries are >= 0: the bound at j = 0 reads 2 pi |u_0| <= |z| + alpha,
    // which holds with alpha to spare for rays entering strip u_0 from the side
    // away from the real axis, but has no slack left for the a = 0 partition
    // (M = 2 pi > alpha) when the first entry is negative and the ray sits just
    // below its asymptote. Negative entries still appear at j >= 1, where each
    // exp application makes the bound provable.
    std::vector<ExternalAddress> addrs;
    for (long long k = 0; k <= 4; ++k)
        addrs.push_back(ExternalAddress::constant(k));
    addrs.push_back(ExternalAddress::periodic({0, 1}));
    addrs.push_back(ExternalAddress::periodic({1, 0}));
    addrs.push_back(ExternalAddress::periodic({2, -1}));
    addrs.push_back(ExternalAddress::periodic({1, -2}));
    addrs.push_back(ExternalAddress::parse("3,1;const:0"));
    for (const auto& s : addrs) {
        for (int i = 0; i < points_per_address; ++i) {
            double t = 1.0 * std::pow(6.0, static_cast<double>(i) /
                                               (points_per_address - 1));
            RayPoint pt = trace_ray(a0, s, t, default_trace_depth(t));
            auto mags = detail::ray_entry_magnitudes(part, pt, prefix_len);
            double bound_x = std::abs(pt.z) + part.alpha();
            ++r.samples;
            for (std::size_t j = 0; j < mags.size(); ++j) {
                auto lhs = TowerMagnitude::from_value(kTwoPi * mags[j]);
                auto rhs = iterated_exp(bound_x, static_cast<int>(j));
                if (tower_cmp(lhs, rhs) == Ordering::Greater) ++r.violations;
                if (lhs.representable() && rhs.representable())
                    r.worst_slack =
                        std::min(r.worst_slack, rhs.value() - lhs.value());
            }
        }
    }
    r.pass = r.violations == 0;
    return r;
}

/// Tower-arithmetic cross-checks: agreement with direct doubles in range,
/// transitivity and order embedding on random triples.
inline SuiteResult verify_tower(std::uint64_t seed, std::uint64_t n) {
    SuiteResult r{"tower", 0, 0, std::numeric_limits<double>::infinity(),
                  false};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> xs(0.0, 200.0);
    std::uniform_int_distribution<int> ns(0, 4);
    double worst_rel = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        double x = xs(rng);
        int k = ns(rng);
        double direct = x;
        bool in_range = true;
        for (int j = 0; j < k; ++j) {
            if (direct > 690.0) {
                in_range = false;
                break;
            }
            direct = std::exp(direct);
        }
        if (!in_range || direct >= 1e300) continue;
        ++r.samples;
        double got = iterated_exp(x, k).value();
        double rel = std::abs(got - direct) / std::max(direct, 1e-300);
        worst_rel = std::max(worst_rel, rel);
        if (rel > 1e-12) ++r.violations;
    }
    // Transitivity and order embedding.
    std::uniform_int_distribution<int> ls(0, 3);
    std::uniform_real_distribution<double> mm(0.0, kTowerBandHi);
    auto rank = [](Ordering o) { return o == Ordering::Less ? -1 : (o == Ordering::Greater ? 1 : 0); };
    for (std::uint64_t i = 0; i < n; ++i) {
        TowerMagnitude t[3];
        for (auto& ti : t) ti = TowerMagnitude::make(ls(rng), mm(rng));
        ++r.samples;
        int ab = rank(tower_cmp(t[0], t[1]));
        int bc = rank(tower_cmp(t[1], t[2]));
        int ac = rank(tower_cmp(t[0], t[2]));
        bool ok = true;
        if (ab == bc && ab != 0) ok = ac == ab;
        if (ab == 0 && bc == 0) ok = ac == 0;
        if (ok && t[0].representable() && t[1].representable()) {
            double d0 = t[0].value(), d1 = t[1].value();
            if (std::abs(d0 - d1) > 1e-9 * std::max(1.0, std::max(d0, d1)))
                ok = (d0 < d1) == (ab < 0);
        }
        if (!ok) ++r.violations;
    }
    r.worst_slack = 1e-12 - worst_rel;
    r.pass = r.violations == 0;
    return r;
}

/// Partition equivariance: strip_index(z + 2 pi i k) = strip_index(z) + k.
inline SuiteResult verify_equivariance(std::uint64_t seed, std::uint64_t n) {
    SuiteResult r{"equivariance", 0, 0,
                  std::numeric_limits<double>::infinity(), false};
    Partition part = detail::reference_partition_a0();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> res(part.traced_re_min() + 0.5,
                                               25.0);
    std::uniform_real_distribution<double> ims(-20.0, 20.0);
    std::uniform_int_distribution<long long> ks(-3, 3);
    for (std::uint64_t i = 0; i < n; ++i) {
        Complex z(res(rng), ims(rng));
        StripIndex base = part.strip_index(z);
        if (base.ambiguous) continue;  // boundary jitter, skip
        long long k = ks(rng);
        ++r.samples;
        StripIndex shifted =
            part.strip_index(z + Complex(0.0, kTwoPi * static_cast<double>(k)));
        if (shifted.ambiguous || shifted.k != base.k + k) ++r.violations;
    }
    r.worst_slack = 0.0;
    r.pass = r.violations == 0;
    return r;
}

inline std::vector<SuiteResult> verify_all(std::uint64_t seed,
                                           std::uint64_t elementary_n = 100000,
                                           std::uint64_t tower_n = 10000,
                                           std::uint64_t equivariance_n = 2000) {
    return {verify_elementary(seed, elementary_n), verify_sandwich(),
            verify_exp_bound(), verify_tower(seed + 1, tower_n),
            verify_equivariance(seed + 2, equivariance_n)};
}

}  // namespace expmapkit
