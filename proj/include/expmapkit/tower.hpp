#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "expmapkit/errors.hpp"

namespace expmapkit {

inline constexpr double kTowerMantissaTol = 1e-12;
inline constexpr double kTowerBandHi = 2.718281828459045235360287;  // e
inline constexpr double kDoubleCap = 1e300;
inline constexpr double kExpArgMax = 690.0;  // exp stays well below kDoubleCap

enum class Ordering { Less, Equal, Greater };

/// Nonnegative magnitude stored as exp^level(mantissa).
///
/// Canonical form: level == 0 with mantissa in [0, e), or level > 0 with
/// mantissa in [1, e). The level ranges [exp^L(1), exp^L(e)) are disjoint and
/// increasing, so (level, mantissa) compares lexicographically.
class TowerMagnitude {
public:
    TowerMagnitude() = default;

    static TowerMagnitude from_value(double v) {
        if (!(v >= 0.0) || std::isnan(v))
            throw InvalidInput("TowerMagnitude: value must be finite and >= 0");
        if (std::isinf(v))
            throw InvalidInput("TowerMagnitude: value must be finite");
        return make(0, v);
    }

    static TowerMagnitude make(int level, double mantissa) {
        if (level < 0 || !(mantissa >= 0.0))
            throw InvalidInput("TowerMagnitude: bad level/mantissa");
        TowerMagnitude t;
        t.level_ = level;
        t.mantissa_ = mantissa;
        t.normalize();
        return t;
    }

    int level() const { return level_; }
    double mantissa() const { return mantissa_; }

    /// Semantic value; saturates to +inf once it leaves the double range.
    double value() const {
        double v = mantissa_;
        for (int i = 0; i < level_; ++i) {
            if (v > 709.0) return std::numeric_limits<double>::infinity();
            v = std::exp(v);
        }
        return v;
    }

    bool representable(double cap = kDoubleCap) const {
        double v = value();
        return std::isfinite(v) && v < cap;
    }

    /// exp of the represented value.
    TowerMagnitude exp_applied() const { return make(level_ + 1, mantissa_); }

private:
    void normalize() {
        while (mantissa_ >= kTowerBandHi) {
            mantissa_ = std::log(mantissa_);
            ++level_;
        }
        while (level_ > 0 && mantissa_ < 1.0) {
            mantissa_ = std::exp(mantissa_);
            --level_;
        }
    }

    int level_ = 0;
    double mantissa_ = 0.0;
};

/// Total order consistent with real values; ties within the mantissa
/// tolerance report Equal. Levels are aligned by iterated log.
inline Ordering tower_cmp(const TowerMagnitude& u, const TowerMagnitude& v) {
    // Align to the common (higher) level by taking logs of the mantissa.
    double mu = u.mantissa(), mv = v.mantissa();
    int lu = u.level(), lv = v.level();
    while (lu < lv) {
        if (mu <= 0.0) return Ordering::Less;  // log would be -inf: strictly smaller
        mu = std::log(mu);
        ++lu;
    }
    while (lv < lu) {
        if (mv <= 0.0) return Ordering::Greater;
        mv = std::log(mv);
        ++lv;
    }
    if (std::abs(mu - mv) <= kTowerMantissaTol) return Ordering::Equal;
    return mu < mv ? Ordering::Less : Ordering::Greater;
}

inline bool tower_leq(const TowerMagnitude& u, const TowerMagnitude& v) {
    return tower_cmp(u, v) != Ordering::Greater;
}

/// exp^n(x) in canonical form; agrees with direct evaluation in-range.
inline TowerMagnitude iterated_exp(double x, int n) {
    if (n < 0) throw InvalidInput("iterated_exp: n must be >= 0");
    TowerMagnitude t = TowerMagnitude::from_value(x);
    for (int i = 0; i < n; ++i) t = t.exp_applied();
    return t;
}

/// Minimal x >= 0 with exp^j(x) >= v (clamped at 0):
/// L_0(v) = v, L_j(v) = ln(max(L_{j-1}(v), 1)).
inline double iterated_log_need(double v, int j) {
    if (!(v > 0.0)) throw InvalidInput("iterated_log_need: v must be > 0");
    if (j < 0) throw InvalidInput("iterated_log_need: j must be >= 0");
    double x = v;
    for (int i = 0; i < j; ++i) x = std::log(std::max(x, 1.0));
    return std::max(x, 0.0);
}

/// t + c, clamped at 0. Exact while the value is representable; beyond that
/// |c| perturbs the mantissa by less than the tolerance and t is returned
/// unchanged (requires |c| <= 1e250).
inline TowerMagnitude tower_add(const TowerMagnitude& t, double c) {
    if (!std::isfinite(c) || std::abs(c) > 1e250)
        throw InvalidInput("tower_add: offset out of supported range");
    if (t.representable(1e280))
        return TowerMagnitude::from_value(std::max(t.value() + c, 0.0));
    return t;
}

/// t * f for moderate f > 0. Exact in-range; otherwise folds ln f into the
/// exponent one level down.
inline TowerMagnitude tower_scale(const TowerMagnitude& t, double f) {
    if (!(f > 0.0) || !std::isfinite(f) || f > 1e100)
        throw InvalidInput("tower_scale: factor out of supported range");
    if (t.representable(1e280 / std::max(f, 1.0)))
        return TowerMagnitude::from_value(t.value() * f);
    // level >= 1 here: value = exp(W) with W = exp^(level-1)(mantissa).
    TowerMagnitude w = TowerMagnitude::make(t.level() - 1, t.mantissa());
    return tower_add(w, std::log(f)).exp_applied();
}

/// u + v. Exact in-range; once the larger operand leaves the double range the
/// smaller one shifts its mantissa by less than the tolerance.
inline TowerMagnitude tower_add(const TowerMagnitude& u, const TowerMagnitude& v) {
    if (u.representable(1e280) && v.representable(1e280))
        return TowerMagnitude::from_value(u.value() + v.value());
    return tower_cmp(u, v) == Ordering::Less ? v : u;
}

/// exp(value) - 1, as a lower-bound-tight tower (the -1 is dropped once it
/// falls below the mantissa tolerance).
inline TowerMagnitude tower_expm1(const TowerMagnitude& t) {
    if (t.representable(kExpArgMax))
        return TowerMagnitude::from_value(std::expm1(t.value()));
    return t.exp_applied();
}

}  // namespace expmapkit
