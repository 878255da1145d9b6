#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "expmapkit/core.hpp"
#include "expmapkit/errors.hpp"
#include "expmapkit/ray.hpp"
#include "expmapkit/tower.hpp"

namespace expmapkit {

struct StripIndex {
    long long k;
    bool ambiguous;
    long long k_other;  // valid when ambiguous; |k - k_other| == 1

    long long max_abs() const {
        return ambiguous ? std::max(std::llabs(k), std::llabs(k_other))
                         : std::llabs(k);
    }
};

/// Strip partition built from a traced singular ray gamma. The boundary
/// curves eta_k = eta_0 + 2 pi i k bound the strips; S_0 is the strip
/// containing r + pi i for large r. Carries the constants R, M,
/// alpha = ln(3(|a|+M+2)).
class Partition {
public:
    Partition(Parameter a, RayPolyline gamma, int K, double R)
        : a_(a), gamma_(std::move(gamma)), K_(K), R_(R) {
        if (K_ < 1) throw InvalidInput("Partition: K must be >= 1");
        if (gamma_.samples.empty())
            throw InvalidInput("Partition: gamma has no samples");
        build();
    }

    const Parameter& parameter() const { return a_; }
    const RayPolyline& gamma() const { return gamma_; }
    int K() const { return K_; }
    double R() const { return R_; }
    double M() const { return M_; }
    double alpha() const { return alpha_; }
    double asymptotic_offset() const { return c0_; }
    double traced_re_min() const { return curve_.front().re; }
    double traced_re_max() const { return curve_.back().re; }

    /// Sampled boundary curve eta_k (|k| <= K), ordered by Re.
    std::vector<Complex> curve(int k) const {
        if (std::abs(k) > K_) throw InvalidInput("Partition: |k| > K");
        std::vector<Complex> out;
        out.reserve(curve_.size());
        for (const auto& s : curve_)
            out.emplace_back(s.re, s.im + kTwoPi * k);
        return out;
    }

    /// Interpolated Im of eta_0 at the given real part; the right end uses
    /// the horizontal asymptote.
    double boundary_im(double re) const {
        if (re < curve_.front().re)
            throw OutOfTracedRange("strip_index: left of traced curves");
        if (re >= curve_.back().re) return c0_;
        auto it = std::lower_bound(
            curve_.begin(), curve_.end(), re,
            [](const Sample& s, double x) { return s.re < x; });
        if (it == curve_.begin()) return it->im;
        const Sample& hi = *it;
        const Sample& lo = *(it - 1);
        double w = (re - lo.re) / (hi.re - lo.re);
        return lo.im + w * (hi.im - lo.im);
    }

    /// Locate z vertically between the interpolated curves.
    StripIndex strip_index(Complex z, double eps = 1e-6) const {
        if (!(eps > 0.0)) throw InvalidInput("strip_index: eps must be > 0");
        double y0 = boundary_im(z.real());
        double rel = z.imag() - y0;
        if (!(std::abs(rel) < 5e18))
            throw InvalidInput("strip_index: |Im z| too large to index strips");
        double kf = std::floor(rel / kTwoPi);
        long long k = static_cast<long long>(kf);
        double frac = rel - kTwoPi * kf;
        if (frac < eps) return {k, true, k - 1};
        if (kTwoPi - frac < eps) return {k, true, k + 1};
        return {k, false, k};
    }

private:
    struct Sample {
        double re, im;
    };

    void build() {
        // Continuous inverse-branch lift of gamma, then shift so the right
        // asymptote lands in (-pi, pi] (S_0 contains r + pi i).
        std::vector<Complex> lifted;
        lifted.reserve(gamma_.samples.size());
        Complex prev;
        for (std::size_t i = 0; i < gamma_.samples.size(); ++i) {
            Complex g = gamma_.samples[i].z;
            if (g == a_.a)
                throw GammaThroughSingularValue(
                    "build_partition: gamma sample equals a");
            Complex r = principal_log(g - a_.a);
            if (i > 0) {
                double kshift =
                    std::round((prev.imag() - r.imag()) / kTwoPi);
                r += Complex(0.0, kTwoPi * kshift);
            }
            lifted.push_back(r);
            prev = r;
        }

        std::size_t tailn = std::min<std::size_t>(5, lifted.size());
        double c_base = 0.0;
        for (std::size_t i = lifted.size() - tailn; i < lifted.size(); ++i)
            c_base += lifted[i].imag();
        c_base /= static_cast<double>(tailn);
        double m = std::ceil((c_base - kPi) / kTwoPi);
        for (auto& w : lifted) w -= Complex(0.0, kTwoPi * m);
        c0_ = c_base - kTwoPi * m;

        curve_.reserve(lifted.size());
        for (const auto& w : lifted) curve_.push_back({w.real(), w.imag()});
        std::sort(curve_.begin(), curve_.end(),
                  [](const Sample& x, const Sample& y) { return x.re < y.re; });
        // Vertical ordering of the eta_k fails iff the lifted curve spans
        // 2 pi vertically at one real part.
        std::vector<Sample> dedup;
        for (const auto& s : curve_) {
            if (!dedup.empty() && s.re - dedup.back().re < 1e-12) {
                if (std::abs(s.im - dedup.back().im) >= kTwoPi)
                    throw NonMonotoneCurves(
                        "build_partition: curve ordering violated");
                continue;
            }
            dedup.push_back(s);
        }
        curve_ = std::move(dedup);
        if (curve_.size() < 2)
            throw InvalidInput("build_partition: too few distinct samples");

        M_ = 0.0;
        bool any = false;
        for (const auto& s : curve_) {
            if (s.re < R_) continue;
            M_ = std::max({M_, std::abs(s.im), std::abs(s.im + kTwoPi)});
            any = true;
        }
        if (!any) M_ = std::max(std::abs(c0_), std::abs(c0_ + kTwoPi));
        alpha_ = std::log(3.0 * (a_.modulus() + M_ + 2.0));
    }

    Parameter a_;
    RayPolyline gamma_;
    int K_;
    double R_;
    double M_ = 0.0;
    double alpha_ = 0.0;
    double c0_ = 0.0;
    std::vector<Sample> curve_;
};

inline Partition build_partition(const Parameter& a, RayPolyline gamma, int K,
                                 double R = 0.0) {
    return Partition(a, std::move(gamma), K, R);
}

enum class TruncationReason { BudgetExhausted, OrbitLeftTracedRegion, Escaped };

struct Itinerary {
    std::vector<StripIndex> entries;
    TruncationReason reason = TruncationReason::BudgetExhausted;
};

/// Entries u_j = strip_index(f^j(z)); truncates when the orbit leaves the
/// traced region to the left or the double range to the right.
inline Itinerary itinerary(const Partition& p, Complex z, int m,
                           double eps = 1e-6) {
    if (m < 1) throw InvalidInput("itinerary: m must be >= 1");
    Itinerary it;
    Complex w = z;
    for (int j = 0; j < m; ++j) {
        // Once |w| reaches ~1e13 the |w|-scaled phase error spans whole
        // strips, so no further entry is numerically decidable.
        if (std::abs(w) > 2e13) {
            it.reason = w.real() < p.traced_re_min()
                            ? TruncationReason::OrbitLeftTracedRegion
                            : TruncationReason::Escaped;
            return it;
        }
        try {
            // The orbit's phase error grows with |w| (one exp step amplifies
            // by |w|), so the ambiguity margin widens accordingly.
            it.entries.push_back(
                p.strip_index(w, std::max(eps, std::abs(w) * 1e-13)));
        } catch (const OutOfTracedRange&) {
            it.reason = TruncationReason::OrbitLeftTracedRegion;
            return it;
        }
        if (j + 1 == m) break;
        if (w.real() > kExpOverflowRe) {
            it.reason = TruncationReason::Escaped;
            return it;
        }
        w = step(p.parameter(), w);
        if (!is_finite(w)) {
            it.reason = TruncationReason::Escaped;
            return it;
        }
    }
    it.reason = TruncationReason::BudgetExhausted;
    return it;
}

/// Kneading sequence: itinerary of the singular value.
inline Itinerary kneading(const Partition& p, int m, double eps = 1e-6) {
    return itinerary(p, p.parameter().a, m, eps);
}

/// Minimal x* >= 0 with 2 pi |u_j| <= exp^j(x*) over the prefix; ambiguous
/// entries use the larger |u|.
inline double minimal_exp_bound(const Itinerary& it) {
    if (it.entries.empty())
        throw InvalidInput("minimal_exp_bound: empty itinerary");
    double x = 0.0;
    for (std::size_t j = 0; j < it.entries.size(); ++j) {
        double v = kTwoPi * static_cast<double>(it.entries[j].max_abs());
        if (v <= 0.0) continue;
        x = std::max(x, iterated_log_need(v, static_cast<int>(j)));
    }
    return x;
}

/// Per-link report for the elementary inequality chain
/// exp(|z|+alpha) >= ... >= |f(z)| + M + alpha.
struct ElementaryReport {
    bool ok = false;
    double alpha = 0.0;
    double slack = 0.0;  // outermost LHS - RHS (log-domain when tower_path)
    std::array<double, 4> link_slacks{};
    bool tower_path = false;
};

inline ElementaryReport check_elementary(const Parameter& p, double M,
                                         Complex z) {
    if (!(M >= 0.0)) throw InvalidInput("check_elementary: M must be >= 0");
    if (!is_finite(z)) throw InvalidInput("check_elementary: z must be finite");
    ElementaryReport r;
    double am2 = p.modulus() + M + 2.0;
    r.alpha = std::log(3.0 * am2);
    double az = std::abs(z), re = z.real();

    if (az + r.alpha <= 700.0) {
        double lhs = std::exp(az + r.alpha);
        double a2 = std::exp(az) + 2.0 * am2;
        double a3 = std::exp(re) + p.modulus() + M + std::log(3.0) + am2;
        double a4 = std::exp(re) + p.modulus() + M + r.alpha;
        double a5 = std::abs(std::exp(z) + p.a) + M + r.alpha;
        r.link_slacks = {lhs - a2, a2 - a3, a3 - a4, a4 - a5};
        r.slack = lhs - a5;
        r.ok = lhs >= a5;
        return r;
    }

    // Tower-safe path: every quantity handled via its logarithm,
    // log(e^x + c) = x + log1p(c e^{-x}).
    r.tower_path = true;
    auto logsum = [](double x, double c) {
        return c <= 0.0 ? x : x + std::log1p(c * std::exp(std::min(-x, 0.0)));
    };
    double l1 = az + r.alpha;
    double l2 = logsum(az, 2.0 * am2);
    double l3 = logsum(re, p.modulus() + M + std::log(3.0) + am2);
    double l4 = logsum(re, p.modulus() + M + r.alpha);
    // |f(z)| <= exp(Re z) + |a|; upper-bound the final term.
    double l5 = logsum(re, 2.0 * p.modulus() + M + r.alpha);
    r.link_slacks = {l1 - l2, l2 - l3, l3 - l4, l4 - l5};
    r.slack = l1 - l5;
    r.ok = l1 >= l5;
    return r;
}

/// Smallest p <= p_max consistent with u_{j+p} = u_j on the prefix
/// (ambiguous entries match either candidate); a finite prefix can only be
/// "consistent with" a period, never a proof.
inline std::optional<int> periodicity_check(const Itinerary& it, int p_max) {
    if (p_max < 1) throw InvalidInput("periodicity_check: p_max must be >= 1");
    if (static_cast<int>(it.entries.size()) < 3 * p_max)
        throw PrefixTooShort("periodicity_check: prefix shorter than 3*p_max");
    auto matches = [](const StripIndex& x, const StripIndex& y) {
        auto in = [](const StripIndex& s, long long v) {
            return s.k == v || (s.ambiguous && s.k_other == v);
        };
        return in(x, y.k) || (y.ambiguous && in(x, y.k_other));
    };
    for (int p = 1; p <= p_max; ++p) {
        bool ok = true;
        for (std::size_t j = 0; j + p < it.entries.size() && ok; ++j)
            ok = matches(it.entries[j], it.entries[j + static_cast<std::size_t>(p)]);
        if (ok) return p;
    }
    return std::nullopt;
}

}  // namespace expmapkit
