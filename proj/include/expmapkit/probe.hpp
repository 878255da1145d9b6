#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <variant>
#include <vector>

#include "expmapkit/core.hpp"
#include "expmapkit/errors.hpp"
#include "expmapkit/tower.hpp"

namespace expmapkit {

struct SingularEscapes {
    int escape_step;
};
struct AttractingCycle {
    int period;
    double multiplier_modulus;  // < 1 - tol
};
struct Undetermined {
    int n_max;
    int p_max;
};
using ParameterClass =
    std::variant<SingularEscapes, AttractingCycle, Undetermined>;

/// Tri-state by design: parabolic and Siegel cases land in Undetermined.
inline ParameterClass classify_parameter(const Parameter& p, int n_max = 400,
                                         int p_max = 8, int burn_in = 200,
                                         double tol = 1e-6, double T = 50.0) {
    if (n_max < 1 || p_max < 1 || burn_in < 0)
        throw InvalidInput("classify_parameter: budgets must be positive");
    Orbit o = orbit(p, p.a, n_max, T, 2);
    if (o.status == OrbitStatus::EscapedAt)
        return SingularEscapes{o.escape_step};
    if (o.status == OrbitStatus::AmbiguousNearBoundary)
        return Undetermined{n_max, p_max};

    const auto& pts = o.points;
    int last = static_cast<int>(pts.size()) - 1;
    if (last <= burn_in) return Undetermined{n_max, p_max};
    for (int period = 1; period <= p_max; ++period) {
        if (last - period <= burn_in) break;
        double d = std::abs(pts[static_cast<std::size_t>(last)] -
                            pts[static_cast<std::size_t>(last - period)]);
        if (d > 1e-7) continue;
        // Multiplier of the limit cycle: product of f'(z) = e^z over one
        // period, evaluated at the converged tail.
        double log_mod = 0.0;
        for (int i = 0; i < period; ++i)
            log_mod += pts[static_cast<std::size_t>(last - i)].real();
        double mod = std::exp(log_mod);
        if (mod < 1.0 - tol) return AttractingCycle{period, mod};
        return Undetermined{n_max, p_max};  // neutral-ish: not separable
    }
    return Undetermined{n_max, p_max};
}

enum class Connectivity { Connected, Disconnected, Unknown };

struct ConnectivityPrediction {
    Connectivity verdict;
    bool conditional;  // rests on accessibility + non-periodic kneading
};

struct KneadingEvidence {
    bool accessible_singular_value;
    std::optional<int> consistent_period;  // nullopt = no period found
};

inline ConnectivityPrediction predict_connectivity(
    const ParameterClass& c,
    const std::optional<KneadingEvidence>& evidence = {}) {
    if (std::holds_alternative<SingularEscapes>(c))
        return {Connectivity::Connected, false};
    if (std::holds_alternative<AttractingCycle>(c))
        return {Connectivity::Disconnected, false};
    if (evidence && evidence->accessible_singular_value &&
        !evidence->consistent_period)
        return {Connectivity::Connected, true};
    return {Connectivity::Unknown, false};
}

struct Box {
    double re_lo, re_hi, im_lo, im_hi;
};

inline constexpr std::uint32_t kNotEscaped = 0xFFFFFFFFu;

/// First-passage escape raster; row 0 holds the top of the box (Im = im_hi).
struct EscapeGrid {
    Parameter parameter;
    Box box;
    int width, height;
    int n_max;
    double T;
    std::vector<std::uint32_t> cells;  // row-major

    std::uint32_t at(int x, int y) const {
        return cells[static_cast<std::size_t>(y) *
                         static_cast<std::size_t>(width) +
                     static_cast<std::size_t>(x)];
    }
    bool escaped(int x, int y) const { return at(x, y) != kNotEscaped; }
    Complex cell_center(int x, int y) const {
        double dx = (box.re_hi - box.re_lo) / width;
        double dy = (box.im_hi - box.im_lo) / height;
        return {box.re_lo + (x + 0.5) * dx, box.im_hi - (y + 0.5) * dy};
    }
};

namespace detail {

// First passage under the certified escape rule; kNotEscaped on budget
// exhaustion or ambiguity.
inline std::uint32_t first_passage(const Parameter& p, Complex z, int n_max,
                                   double T, int certify_steps) {
    for (int n = 0; n <= n_max; ++n) {
        if (z.real() > T &&
            certify_escape(p, z, T, certify_steps, nullptr) ==
                CertifyOutcome::Certified)
            return static_cast<std::uint32_t>(n);
        if (n == n_max || z.real() > kExpOverflowRe) break;
        z = std::exp(z) + p.a;
        if (!is_finite(z)) break;
    }
    return kNotEscaped;
}

}  // namespace detail

inline EscapeGrid escape_grid(const Parameter& p, const Box& box, int width,
                              int height, int n_max, double T = 50.0) {
    if (width < 2 || height < 2)
        throw InvalidInput("escape_grid: resolution must be >= 2x2");
    if (!(box.re_lo < box.re_hi && box.im_lo < box.im_hi))
        throw InvalidInput("escape_grid: degenerate box");
    if (n_max < 1) throw InvalidInput("escape_grid: n_max must be >= 1");
    EscapeGrid g{p, box, width, height, n_max, T, {}};
    g.cells.resize(static_cast<std::size_t>(width) *
                   static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            g.cells[static_cast<std::size_t>(y) * width + x] =
                detail::first_passage(p, g.cell_center(x, y), n_max, T, 2);
    return g;
}

enum class CellClass { Escaping, NonEscaping };

struct ComponentLabels {
    int count = 0;
    std::vector<std::int32_t> labels;       // -1 for cells outside the class
    std::vector<int> sizes_by_id;           // indexed by component id
    std::vector<int> ids_by_size;           // ids sorted by size descending
};

/// Connected-component labeling by BFS (ids in scan order).
inline ComponentLabels label_components(const EscapeGrid& g, CellClass which,
                                        int connectivity = 4) {
    if (connectivity != 4 && connectivity != 8)
        throw InvalidInput("label_components: connectivity must be 4 or 8");
    const int w = g.width, h = g.height;
    auto in_class = [&](int x, int y) {
        return (g.escaped(x, y)) == (which == CellClass::Escaping);
    };
    ComponentLabels out;
    out.labels.assign(static_cast<std::size_t>(w) * h, -1);
    static constexpr int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    int ndirs = connectivity == 4 ? 4 : 8;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!in_class(x, y) || out.labels[static_cast<std::size_t>(y) * w + x] >= 0)
                continue;
            int id = out.count++;
            int size = 0;
            stack.push_back({x, y});
            out.labels[static_cast<std::size_t>(y) * w + x] = id;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                ++size;
                for (int d = 0; d < ndirs; ++d) {
                    int nx = cx + dx8[d], ny = cy + dy8[d];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    auto idx = static_cast<std::size_t>(ny) * w + nx;
                    if (!in_class(nx, ny) || out.labels[idx] >= 0) continue;
                    out.labels[idx] = id;
                    stack.push_back({nx, ny});
                }
            }
            out.sizes_by_id.push_back(size);
        }
    }
    out.ids_by_size.resize(static_cast<std::size_t>(out.count));
    for (int i = 0; i < out.count; ++i) out.ids_by_size[static_cast<std::size_t>(i)] = i;
    std::stable_sort(out.ids_by_size.begin(), out.ids_by_size.end(),
                     [&](int a, int b) {
                         return out.sizes_by_id[static_cast<std::size_t>(a)] >
                                out.sizes_by_id[static_cast<std::size_t>(b)];
                     });
    return out;
}

/// Grid-scale analogue of a closed connected set of non-escaping points
/// separating escaping points. Blocker is 4-connected, the complement is
/// walked with 8-connectivity (digital-topology duality).
struct Witness {
    int blocker_component_id = -1;
    std::vector<std::pair<int, int>> blocker_cells;
    std::pair<int, int> separated_a{-1, -1};
    std::pair<int, int> separated_b{-1, -1};
    bool touches_boundary = false;
};

/// Direct recheck of the witness invariants.
inline bool witness_sound(const EscapeGrid& g, const Witness& w) {
    const int W = g.width, H = g.height;
    if (w.blocker_cells.empty()) return false;
    std::vector<char> in_blocker(static_cast<std::size_t>(W) * H, 0);
    for (auto [x, y] : w.blocker_cells) {
        if (x < 0 || y < 0 || x >= W || y >= H) return false;
        if (g.escaped(x, y)) return false;
        in_blocker[static_cast<std::size_t>(y) * W + x] = 1;
    }
    // Blocker 4-connected.
    std::vector<char> seen(static_cast<std::size_t>(W) * H, 0);
    std::vector<std::pair<int, int>> stack{w.blocker_cells.front()};
    seen[static_cast<std::size_t>(stack[0].second) * W + stack[0].first] = 1;
    std::size_t reached = 0;
    static constexpr int dx4[] = {1, -1, 0, 0};
    static constexpr int dy4[] = {0, 0, 1, -1};
    while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        ++reached;
        for (int d = 0; d < 4; ++d) {
            int nx = cx + dx4[d], ny = cy + dy4[d];
            if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
            auto idx = static_cast<std::size_t>(ny) * W + nx;
            if (!in_blocker[idx] || seen[idx]) continue;
            seen[idx] = 1;
            stack.push_back({nx, ny});
        }
    }
    if (reached != w.blocker_cells.size()) return false;
    // Separated cells escape and are 4-disconnected in box \ blocker.
    auto [ax, ay] = w.separated_a;
    auto [bx, by] = w.separated_b;
    if (!g.escaped(ax, ay) || !g.escaped(bx, by)) return false;
    std::fill(seen.begin(), seen.end(), 0);
    stack.assign(1, w.separated_a);
    seen[static_cast<std::size_t>(ay) * W + ax] = 1;
    while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        if (cx == bx && cy == by) return false;
        for (int d = 0; d < 4; ++d) {
            int nx = cx + dx4[d], ny = cy + dy4[d];
            if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
            auto idx = static_cast<std::size_t>(ny) * W + nx;
            if (in_blocker[idx] || seen[idx]) continue;
            seen[idx] = 1;
            stack.push_back({nx, ny});
        }
    }
    return true;
}

inline std::optional<Witness> disconnection_witness(const EscapeGrid& g) {
    const int W = g.width, H = g.height;
    int escaping = 0;
    for (int y = 0; y < H && escaping < 2; ++y)
        for (int x = 0; x < W && escaping < 2; ++x)
            if (g.escaped(x, y)) ++escaping;
    if (escaping < 2)
        throw InvalidInput("disconnection_witness: need >= 2 escaping cells");

    ComponentLabels blockers = label_components(g, CellClass::NonEscaping, 4);
    static constexpr int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    std::vector<std::int32_t> comp(static_cast<std::size_t>(W) * H);
    std::vector<std::pair<int, int>> stack;
    for (int id = 0; id < blockers.count; ++id) {
        // 8-connected components of the complement of this blocker.
        std::fill(comp.begin(), comp.end(), -1);
        int ncomp = 0;
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                auto idx = static_cast<std::size_t>(y) * W + x;
                if (blockers.labels[idx] == id || comp[idx] >= 0) continue;
                int cid = ncomp++;
                comp[idx] = cid;
                stack.push_back({x, y});
                while (!stack.empty()) {
                    auto [cx, cy] = stack.back();
                    stack.pop_back();
                    for (int d = 0; d < 8; ++d) {
                        int nx = cx + dx8[d], ny = cy + dy8[d];
                        if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
                        auto nidx = static_cast<std::size_t>(ny) * W + nx;
                        if (blockers.labels[nidx] == id || comp[nidx] >= 0)
                            continue;
                        comp[nidx] = cid;
                        stack.push_back({nx, ny});
                    }
                }
            }
        }
        if (ncomp < 2) continue;
        // First escaping cell per complement component, in scan order.
        std::pair<int, int> first{-1, -1};
        std::int32_t first_comp = -1;
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                if (!g.escaped(x, y)) continue;
                auto idx = static_cast<std::size_t>(y) * W + x;
                if (first_comp < 0) {
                    first = {x, y};
                    first_comp = comp[idx];
                } else if (comp[idx] != first_comp) {
                    Witness w;
                    w.blocker_component_id = id;
                    for (int yy = 0; yy < H; ++yy)
                        for (int xx = 0; xx < W; ++xx)
                            if (blockers.labels[static_cast<std::size_t>(yy) * W +
                                                xx] == id) {
                                w.blocker_cells.push_back({xx, yy});
                                if (xx == 0 || yy == 0 || xx == W - 1 ||
                                    yy == H - 1)
                                    w.touches_boundary = true;
                            }
                    w.separated_a = first;
                    w.separated_b = {x, y};
                    if (!witness_sound(g, w))
                        throw Error("disconnection_witness: soundness recheck failed");
                    return w;
                }
            }
        }
    }
    return std::nullopt;
}

/// Per-step report for the pullback sandwich
/// exp^j(x0) - 1 <= |f^j(z)| <= 2 exp^j(x0) + 1, checked in tower form.
struct SandwichStep {
    TowerMagnitude magnitude;
    bool estimated;  // magnitude continued in tower form past double range
    double lower_slack;
    double upper_slack;
    bool ok;
};

struct SandwichReport {
    bool ok = true;
    std::vector<SandwichStep> steps;
};

inline SandwichReport sandwich_check(const Parameter& p, Complex z, double x0,
                                     int n) {
    if (n < 0) throw InvalidInput("sandwich_check: n must be >= 0");
    if (!(x0 >= 0.0)) throw InvalidInput("sandwich_check: x0 must be >= 0");

    // Orbit magnitudes in tower form. Past the double range only essentially
    // real orbits stay representable.
    std::vector<TowerMagnitude> mags;
    std::vector<bool> estimated;
    Complex w = z;
    bool tower_mode = false;
    TowerMagnitude x;
    for (int j = 0; j <= n; ++j) {
        if (tower_mode) {
            x = tower_add(x.exp_applied(), p.a.real());
            mags.push_back(x);
            estimated.push_back(true);
            continue;
        }
        mags.push_back(TowerMagnitude::from_value(std::abs(w)));
        estimated.push_back(false);
        if (j == n) break;
        if (w.real() <= kExpArgMax) {
            w = std::exp(w) + p.a;
        } else {
            if (std::abs(w.imag()) > 1e-8 * std::max(1.0, std::abs(w.real())) ||
                std::abs(p.a.imag()) > 1e-12)
                throw PreconditionViolated(
                    "sandwich_check: orbit not representable in tower form");
            x = TowerMagnitude::from_value(w.real());
            tower_mode = true;
        }
    }

    // Anchor: |f^n(z)| within a factor 2 of exp^n(x0).
    TowerMagnitude target = iterated_exp(x0, n);
    if (!tower_leq(mags.back(), tower_scale(target, 2.0)) ||
        !tower_leq(target, tower_scale(mags.back(), 2.0)))
        throw PreconditionViolated("sandwich_check: anchor condition fails");

    SandwichReport r;
    for (int j = 0; j <= n; ++j) {
        TowerMagnitude ej = iterated_exp(x0, j);
        TowerMagnitude lower = tower_add(ej, -1.0);
        TowerMagnitude upper = tower_add(tower_scale(ej, 2.0), 1.0);
        const TowerMagnitude& m = mags[static_cast<std::size_t>(j)];
        bool ok = tower_leq(lower, m) && tower_leq(m, upper);
        double lo_slack = (m.representable() && lower.representable())
                              ? m.value() - lower.value()
                              : std::numeric_limits<double>::infinity();
        double hi_slack = (m.representable() && upper.representable())
                              ? upper.value() - m.value()
                              : std::numeric_limits<double>::infinity();
        r.steps.push_back({m, estimated[static_cast<std::size_t>(j)], lo_slack,
                           hi_slack, ok});
        r.ok = r.ok && ok;
    }
    return r;
}

}  // namespace expmapkit
