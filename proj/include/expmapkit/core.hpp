#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "expmapkit/errors.hpp"
#include "expmapkit/tower.hpp"

namespace expmapkit {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kExpOverflowRe = 709.78;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// The singular (omitted) value a of f_a(z) = exp(z) + a.
struct Parameter {
    Complex a;

    explicit Parameter(Complex value) : a(value) {
        if (!is_finite(a)) throw InvalidInput("Parameter: a must be finite");
    }
    Parameter(double re, double im) : Parameter(Complex(re, im)) {}

    double modulus() const { return std::abs(a); }
};

/// One application of f_a.
inline Complex step(const Parameter& p, Complex z) {
    if (!is_finite(z)) throw InvalidInput("step: z must be finite");
    if (z.real() > kExpOverflowRe)
        throw RangeExceeded("step: exp(Re z) overflows, switch to tower mode");
    return std::exp(z) + p.a;
}

/// Principal logarithm with Im in (-pi, pi].
inline Complex principal_log(Complex w) {
    Complex r = std::log(w);
    if (r.imag() <= -kPi) r = Complex(r.real(), r.imag() + kTwoPi);
    return r;
}

/// Branch of f_a^{-1} indexed by strip k: Log(w - a) + 2 pi i k.
inline Complex inverse_branch(const Parameter& p, Complex w, long long k) {
    if (!is_finite(w)) throw InvalidInput("inverse_branch: w must be finite");
    Complex d = w - p.a;
    if (d == Complex(0.0, 0.0))
        throw SingularValueHit("inverse_branch: w equals the omitted value a");
    Complex r = principal_log(d);
    return r + Complex(0.0, kTwoPi * static_cast<double>(k));
}

enum class OrbitStatus { EscapedAt, BoundedWithinBudget, AmbiguousNearBoundary };

/// Tower-form continuation of a real-part lower bound once the orbit leaves
/// the double range.
struct TowerSample {
    int level;
    double mantissa;
    bool im_estimated;  // imaginary part no longer tracked exactly
};

struct Orbit {
    Parameter parameter;
    Complex start;
    std::vector<Complex> points;  // iterates while representable
    std::vector<TowerSample> tower_tail;
    OrbitStatus status = OrbitStatus::BoundedWithinBudget;
    int escape_step = -1;  // valid when status == EscapedAt
};

namespace detail {

enum class CertifyOutcome { Certified, NotSustained };

// Escape certification: from z with Re z > T, check that a lower bound on the
// real part stays above T for the next `steps` iterations. Exact complex
// steps while representable; past the overflow boundary the bound
// Re z' >= exp(Re z) cos_bound - |a| is tracked in tower form. Once the
// phase of z is no longer trustworthy (|Im| amplified past the double
// mantissa, or already in tower form) a fixed cosine floor exp(-6) stands in
// for cos_bound; this is the heuristic over-approximation of fast
// right-moving escape documented for orbit().
inline CertifyOutcome certify_escape(const Parameter& p, Complex z, double T,
                                     int steps,
                                     std::vector<TowerSample>* tail) {
    bool exact = true;
    TowerMagnitude lower = TowerMagnitude::from_value(std::max(z.real(), 0.0));
    for (int s = 0; s < steps; ++s) {
        if (exact && z.real() <= kExpArgMax) {
            z = std::exp(z) + p.a;
            if (!is_finite(z) || z.real() <= T) return CertifyOutcome::NotSustained;
            lower = TowerMagnitude::from_value(z.real());
        } else if (exact) {
            double im = z.imag();
            double c = std::exp(-6.0);  // heuristic floor, phase unknown
            if (std::abs(im) < 1e8) {
                double ci = std::cos(im) - 1e-3 - std::abs(im) * 1e-13;
                c = std::max(c, ci);
            }
            // exp(Re z) c - |a| >= exp(Re z + ln c - 1) for Re z this large.
            lower = TowerMagnitude::from_value(z.real() + std::log(c) - 1.0)
                        .exp_applied();
            exact = false;
            if (tower_cmp(lower, TowerMagnitude::from_value(T)) !=
                Ordering::Greater)
                return CertifyOutcome::NotSustained;
        } else {
            lower = tower_add(lower, -7.0).exp_applied();
        }
        if (tail) tail->push_back({lower.level(), lower.mantissa(), !exact});
    }
    return CertifyOutcome::Certified;
}

}  // namespace detail

/// Iterate f_a from z. Escape rule (heuristic, see README): Re z_n > T and
/// the certified real-part lower bound stays above T for certify_steps more
/// steps.
inline Orbit orbit(const Parameter& p, Complex z, int n_max, double T = 50.0,
                   int certify_steps = 2) {
    if (!is_finite(z)) throw InvalidInput("orbit: z must be finite");
    if (n_max < 1) throw InvalidInput("orbit: n_max must be >= 1");
    if (T < 20.0) throw InvalidInput("orbit: T must be >= 20");
    if (certify_steps < 0) throw InvalidInput("orbit: certify_steps must be >= 0");

    Orbit o{p, z, {}, {}, OrbitStatus::BoundedWithinBudget, -1};
    o.points.push_back(z);
    for (int n = 0; n <= n_max; ++n) {
        if (z.real() > T) {
            std::vector<TowerSample> tail;
            auto outcome =
                detail::certify_escape(p, z, T, certify_steps, &tail);
            if (outcome == detail::CertifyOutcome::Certified) {
                o.status = OrbitStatus::EscapedAt;
                o.escape_step = n;
                o.tower_tail = std::move(tail);
                return o;
            }
        }
        if (n == n_max) break;
        if (z.real() > kExpOverflowRe) {
            // Past the double range without passing certification.
            o.status = OrbitStatus::AmbiguousNearBoundary;
            return o;
        }
        z = std::exp(z) + p.a;
        if (!is_finite(z)) {
            o.status = OrbitStatus::AmbiguousNearBoundary;
            return o;
        }
        o.points.push_back(z);
    }
    return o;
}

}  // namespace expmapkit
