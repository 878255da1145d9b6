#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "expmapkit/address.hpp"
#include "expmapkit/core.hpp"
#include "expmapkit/errors.hpp"
#include "expmapkit/tower.hpp"

namespace expmapkit {

/// First-order estimate of a pullback residual, kept in tower form because
/// residuals shrink doubly exponentially and underflow doubles almost
/// immediately. estimate = exp(-neg_log); clamped means the raw negated log
/// was <= 0 and the estimate is only known to be O(1).
struct ResidualEstimate {
    TowerMagnitude neg_log;
    bool clamped = false;

    double to_double() const {
        if (clamped) return 1.0;
        double v = neg_log.value();
        return std::isinf(v) ? 0.0 : std::exp(-v);
    }
};

/// est_a < factor * est_b, evaluated on the negated logs in tower form.
inline bool estimate_less(const ResidualEstimate& a, const ResidualEstimate& b,
                          double factor = 1.0) {
    if (a.clamped || b.clamped) return false;
    return tower_cmp(a.neg_log, tower_add(b.neg_log, -std::log(factor))) ==
           Ordering::Greater;
}

struct RayPoint {
    ExternalAddress address;
    double t;       // potential, > 0
    Complex z;
    int depth;
    double residual;  // |z(depth) - z(depth-1)| in doubles (0 once underflowed)
    ResidualEstimate residual_estimate;
};

struct RayPolyline {
    ExternalAddress address;
    std::vector<RayPoint> samples;  // strictly increasing potentials
};

inline constexpr double kDefaultTraceTol = 1e-9;
inline constexpr double kDefaultTMin = 0.05;
inline constexpr int kMaxTraceDepth = 64;

/// Potential normalization for tail seeds: F(t) = e^t - 1/2. The offset 1/2
/// keeps F(0) > 0, so the forward potential orbit escapes from any t > 0 and
/// the traced real hair of f_0 covers the whole admissible potential range
/// (with F(t) = e^t - 1 the parabolic point of F at 0 cuts it off near
/// t ~ 0.61).
inline double potential_step(double t) { return std::expm1(t) + 0.5; }

inline TowerMagnitude potential_step_tower(const TowerMagnitude& t) {
    if (t.representable(kExpArgMax))
        return TowerMagnitude::from_value(std::expm1(t.value()) + 0.5);
    return t.exp_applied();
}

/// Depth at which F^depth(t) dominates the target accuracy; capped.
inline int default_trace_depth(double t, double tol = kDefaultTraceTol) {
    double target = std::max(45.0, -std::log(tol) + 10.0);
    TowerMagnitude x = TowerMagnitude::from_value(t);
    int d = 0;
    while (d < kMaxTraceDepth) {
        if (tower_cmp(x, TowerMagnitude::from_value(target)) ==
            Ordering::Greater)
            break;
        x = potential_step_tower(x);
        ++d;
    }
    return std::max(d + 1, 2);
}

namespace detail {

struct TraceRun {
    Complex z;
    ResidualEstimate estimate;
};

// Pull the tail seed w_depth = F^depth(t) + 2 pi i s_depth back to level 0.
// Levels whose potential exceeds the double range contribute nothing beyond
// the mantissa tolerance; the numeric chain starts at the deepest
// representable level.
inline TraceRun trace_to_depth(const Parameter& p, const ExternalAddress& s,
                               double t, int depth) {
    std::vector<TowerMagnitude> pot(static_cast<std::size_t>(depth) + 1);
    pot[0] = TowerMagnitude::from_value(t);
    for (int j = 0; j < depth; ++j) pot[j + 1] = potential_step_tower(pot[j]);

    int start = depth;
    while (start > 0 && !pot[start].representable()) --start;

    Complex w(pot[start].value(),
              kTwoPi * static_cast<double>(s.entry(start)));
    double rep_log_sum = 0.0;  // sum of ln|w_{j+1} - a| over the numeric chain
    for (int j = start - 1; j >= 0; --j) {
        rep_log_sum += std::log(std::abs(w - p.a));
        try {
            w = inverse_branch(p, w, s.entry(j));
        } catch (const SingularValueHit&) {
            throw PullbackHitSingularValue(
                "trace_ray: pullback hit the singular value");
        }
    }

    // First-order residual vs depth-1: difference exp(-F^{depth-1}(t)) * C at
    // the seed level, contracted by 1/|w_{j+1} - a| down the chain. The
    // asymptotic factors contribute ln|w_{j+1}| ~ F^j(t).
    ResidualEstimate est;
    if (depth == 0) {
        est.clamped = true;
        est.neg_log = TowerMagnitude::from_value(0.0);
        return {w, est};
    }
    double c = 2.0 + kTwoPi * std::abs(static_cast<double>(s.entry(depth))) +
               p.modulus();
    TowerMagnitude neg = pot[static_cast<std::size_t>(depth) - 1];
    for (int j = start; j < depth - 1; ++j) neg = tower_add(neg, pot[j]);
    double offset = rep_log_sum - std::log(c);
    if (neg.representable(1e280)) {
        double raw = neg.value() + offset;
        if (raw <= 0.0) {
            est.clamped = true;
            est.neg_log = TowerMagnitude::from_value(0.0);
        } else {
            est.neg_log = TowerMagnitude::from_value(raw);
        }
    } else {
        est.neg_log = tower_add(neg, offset);
    }
    return {w, est};
}

}  // namespace detail

/// Trace the dynamic ray with address s at potential t by inverse-branch
/// pullback from the asymptotic tail seed.
inline RayPoint trace_ray(const Parameter& p, const ExternalAddress& s,
                          double t, int depth,
                          double tol = kDefaultTraceTol,
                          double t_min = kDefaultTMin) {
    if (!(t >= t_min))
        throw InvalidInput("trace_ray: t below t_min");
    if (depth < 1) throw InvalidInput("trace_ray: depth must be >= 1");
    if (!(tol > 0.0)) throw InvalidInput("trace_ray: tol must be > 0");
    if (!s.witness_holds(t + s.bound_witness(),
                         static_cast<std::size_t>(depth)))
        throw IncompatibleAddress("trace_ray: address bound witness violated");

    auto run = detail::trace_to_depth(p, s, t, depth);
    auto prev = detail::trace_to_depth(p, s, t, depth - 1);
    double residual = std::abs(run.z - prev.z);
    if (!(residual <= tol))
        throw NotConverged("trace_ray: residual above tolerance", t);
    return RayPoint{s, t, run.z, depth, residual, run.estimate};
}

/// Geometrically spaced potentials in [t_lo, t_hi], each traced.
inline RayPolyline trace_polyline(const Parameter& p, const ExternalAddress& s,
                                  double t_lo, double t_hi, int count,
                                  int depth = 0,
                                  double tol = kDefaultTraceTol,
                                  double t_min = kDefaultTMin) {
    if (!(0.0 < t_lo && t_lo < t_hi))
        throw InvalidInput("trace_polyline: need 0 < t_lo < t_hi");
    if (count < 2) throw InvalidInput("trace_polyline: count must be >= 2");
    RayPolyline line{s, {}};
    line.samples.reserve(static_cast<std::size_t>(count));
    double ratio = std::log(t_hi / t_lo);
    for (int i = 0; i < count; ++i) {
        double t = t_lo * std::exp(ratio * static_cast<double>(i) /
                                   static_cast<double>(count - 1));
        int d = depth > 0 ? depth : default_trace_depth(t, tol);
        line.samples.push_back(trace_ray(p, s, t, d, tol, t_min));
    }
    return line;
}

/// Finite address prefix estimated from the orbit of a:
/// s_j = round(Im f^j(a) / 2 pi), reliable once real parts are large.
struct AddressEstimate {
    std::vector<long long> entries;
    std::vector<bool> confident;  // false near a strip boundary (odd pi)
};

inline AddressEstimate address_of_orbit(const Parameter& p, int n,
                                        int n_max = 400, double T = 50.0) {
    if (n < 1) throw InvalidInput("address_of_orbit: n must be >= 1");
    Orbit o = orbit(p, p.a, std::max(n, n_max), T, 2);
    if (o.status != OrbitStatus::EscapedAt)
        throw NotEscaping("address_of_orbit: orbit of a does not escape");
    AddressEstimate est;
    for (int j = 0; j < n && j < static_cast<int>(o.points.size()); ++j) {
        double im = o.points[static_cast<std::size_t>(j)].imag();
        double re = o.points[static_cast<std::size_t>(j)].real();
        est.entries.push_back(std::llround(im / kTwoPi));
        // Boundary lines sit at odd multiples of pi in the asymptotic bands.
        double frac = std::remainder(im - kPi, kTwoPi);
        est.confident.push_back(re > 5.0 && std::abs(frac) >= 0.1);
    }
    return est;
}

struct SingularRayBudget {
    int n_max = 400;
    double T = 50.0;
    double t_min = kDefaultTMin;
    double t_hi = 25.0;
    int count = 60;
    int depth = 0;  // 0 = auto
    double tol = kDefaultTraceTol;
    double dist_tol = 1e-6;
    int prefix_len = 8;
};

namespace detail {

struct Locate {
    ExternalAddress address;
    double t_located;
    double dist;  // |trace(t_located) - a|
    bool below_converges;
};

inline std::optional<Complex> try_trace(const Parameter& p,
                                        const ExternalAddress& s, double t,
                                        const SingularRayBudget& b) {
    try {
        int d = b.depth > 0 ? b.depth : default_trace_depth(t, b.tol);
        return trace_ray(p, s, t, d, b.tol, b.t_min).z;
    } catch (const NotConverged&) {
        return std::nullopt;
    } catch (const PullbackHitSingularValue&) {
        return std::nullopt;
    }
}

inline Locate locate_on_ray(const Parameter& p, const SingularRayBudget& b) {
    AddressEstimate ae = address_of_orbit(p, b.prefix_len, b.n_max, b.T);
    if (ae.entries.empty())
        throw LocateFailed("singular_ray: empty address estimate");
    long long tail = ae.entries.back();
    std::vector<long long> prefix(ae.entries.begin(), ae.entries.end() - 1);
    ExternalAddress addr(std::move(prefix),
                         ExternalAddress::ConstantTail{tail});

    // Coarse geometric scan, then golden-section refinement in log t.
    const int scan = 80;
    double best_t = -1.0, best_d = std::numeric_limits<double>::infinity();
    double lr = std::log(b.t_hi / b.t_min);
    std::vector<double> ts(scan), ds(scan, std::numeric_limits<double>::infinity());
    for (int i = 0; i < scan; ++i) {
        double t = b.t_min * std::exp(lr * static_cast<double>(i) / (scan - 1));
        ts[static_cast<std::size_t>(i)] = t;
        if (auto z = try_trace(p, addr, t, b)) {
            ds[static_cast<std::size_t>(i)] = std::abs(*z - p.a);
            if (ds[static_cast<std::size_t>(i)] < best_d) {
                best_d = ds[static_cast<std::size_t>(i)];
                best_t = t;
            }
        }
    }
    if (best_t < 0.0)
        throw LocateFailed("singular_ray: no potential traced successfully");

    auto dist_at = [&](double t) -> double {
        if (auto z = try_trace(p, addr, t, b)) return std::abs(*z - p.a);
        return std::numeric_limits<double>::infinity();
    };
    double lo = std::max(best_t / 1.6, b.t_min), hi = std::min(best_t * 1.6, b.t_hi);
    double a_ = std::log(lo), c_ = std::log(hi);
    const double gr = 0.6180339887498949;
    double x1 = c_ - gr * (c_ - a_), x2 = a_ + gr * (c_ - a_);
    double f1 = dist_at(std::exp(x1)), f2 = dist_at(std::exp(x2));
    for (int it = 0; it < 70; ++it) {
        if (f1 < f2) {
            c_ = x2;
            x2 = x1;
            f2 = f1;
            x1 = c_ - gr * (c_ - a_);
            f1 = dist_at(std::exp(x1));
        } else {
            a_ = x1;
            x1 = x2;
            f1 = f2;
            x2 = a_ + gr * (c_ - a_);
            f2 = dist_at(std::exp(x2));
        }
    }
    double t_loc = std::exp(0.5 * (a_ + c_));
    double d_loc = dist_at(t_loc);
    if (d_loc >= best_d) {
        t_loc = best_t;
        d_loc = best_d;
    }

    bool below = false;
    if (t_loc > b.t_min * 1.01) {
        below = true;
        for (double f : {0.7, 0.5, 0.3}) {
            double t = std::max(t_loc * f, b.t_min);
            if (!try_trace(p, addr, t, b)) {
                below = false;
                break;
            }
        }
    }
    return Locate{addr, t_loc, d_loc, below};
}

}  // namespace detail

/// The accessible-singular-value curve attached to an escaping a: its ray,
/// sampled from the located potential of a outward.
inline RayPolyline singular_ray(const Parameter& p,
                                const SingularRayBudget& b = {}) {
    Orbit o = orbit(p, p.a, b.n_max, b.T, 2);
    if (o.status != OrbitStatus::EscapedAt)
        throw NotEscaping("singular_ray: singular value does not escape");
    auto loc = detail::locate_on_ray(p, b);
    double t_start =
        loc.dist <= b.dist_tol ? std::max(loc.t_located, b.t_min) : b.t_min;
    return trace_polyline(p, loc.address, t_start, b.t_hi, b.count, b.depth,
                          b.tol, b.t_min);
}

enum class EndpointVerdict { NonEndpoint, PossiblyEndpoint, Undetermined };

/// Heuristic only: the endpoint dichotomy is topological and not finitely
/// decidable.
inline EndpointVerdict is_endpoint_heuristic(const Parameter& p,
                                             const SingularRayBudget& b = {}) {
    Orbit o = orbit(p, p.a, b.n_max, b.T, 2);
    if (o.status != OrbitStatus::EscapedAt)
        throw NotEscaping("is_endpoint_heuristic: singular value does not escape");
    auto loc = detail::locate_on_ray(p, b);
    if (loc.t_located <= b.t_min * 1.01) return EndpointVerdict::Undetermined;
    if (loc.below_converges && loc.dist <= b.dist_tol)
        return EndpointVerdict::NonEndpoint;
    if (!loc.below_converges) return EndpointVerdict::PossiblyEndpoint;
    return EndpointVerdict::Undetermined;
}

}  // namespace expmapkit
