#pragma once

// The chord-arc comparison function
//
//     f(x, t) = 2 e^t atan(e^{-t} sin(x/2)),   x in [0, 2pi],
//
// its closed-form derivatives, the companion functions g and h, the implicit
// ratio a(p, q) defined by d = f(l, -log a), and the comparison functional
// Z = d - f(l, t - tbar) evaluated over the vertex pairs of a curve frame.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "csf/error.hpp"
#include "csf/geometry.hpp"

namespace csf {

namespace detail {

// g(z) = atan z - z/(1+z^2); the series avoids cancellation for small z.
inline double g_value(double z) {
    if (z < 1e-2) {
        const double z2 = z * z;
        return z * z2 * (2.0 / 3.0 - z2 * (4.0 / 5.0 - z2 * (6.0 / 7.0 - z2 * (8.0 / 9.0))));
    }
    return std::atan(z) - z / (1.0 + z * z);
}

// atan(z)/z, accurate for small z.
inline double atan_over(double z) {
    if (z < 1e-3) {
        const double z2 = z * z;
        return 1.0 - z2 * (1.0 / 3.0 - z2 * (1.0 / 5.0 - z2 / 7.0));
    }
    return std::atan(z) / z;
}

inline void check_arc_domain(double x) {
    if (!(x >= 0.0 && x <= two_pi)) {
        throw Error(ErrorKind::DomainError, "comparison function argument outside [0, 2pi]",
                    "x=" + std::to_string(x));
    }
}

} // namespace detail

/// g(z) = atan z - z / (1 + z^2), z >= 0.
inline double g_eval(double z) {
    if (z < 0.0) throw Error(ErrorKind::DomainError, "g is defined for z >= 0", "z=" + std::to_string(z));
    return detail::g_value(z);
}

inline double g_derivative(double z) {
    const double q = 1.0 + z * z;
    return 2.0 * z * z / (q * q);
}

/// h(z) = arccos(z)^2 and its first two derivatives on [-1, 1).
inline double h_eval(double z) {
    const double a = std::acos(z);
    return a * a;
}

inline double h_derivative(double z) { return -2.0 * std::acos(z) / std::sqrt(1.0 - z * z); }

inline double h_second_derivative(double z) {
    const double w = 1.0 - z * z;
    return 2.0 / w - 2.0 * z * std::acos(z) / (w * std::sqrt(w));
}

/// f and its partial derivatives at one point.
struct ComparisonJet {
    double value = 0.0;
    double dx = 0.0;
    double dxx = 0.0;
    double dt = 0.0;
};

/// The comparison function. Stateless; the identity checks are written
/// against this interface so that a perturbed variant can be substituted.
struct ArctanComparison {
    double value(double x, double t) const {
        detail::check_arc_domain(x);
        const double s = std::sin(0.5 * x);
        if (s <= 0.0) return 0.0;
        const double z = std::exp(-t) * s;
        if (!std::isfinite(z)) return std::numbers::pi * std::exp(t);
        return 2.0 * s * detail::atan_over(z);
    }

    ComparisonJet jet(double x, double t) const {
        detail::check_arc_domain(x);
        const double s = std::sin(0.5 * x);
        const double c = std::cos(0.5 * x);
        ComparisonJet j;
        if (s <= 0.0) {
            j.dx = c;
            return j;
        }
        const double z = std::exp(-t) * s;
        const double z2 = z * z;
        const double r = std::isfinite(z2) ? 1.0 / (1.0 + z2) : 0.0;
        const double one_minus_r = std::isfinite(z2) ? z2 * r : 1.0;
        j.value = std::isfinite(z) ? 2.0 * s * detail::atan_over(z) : std::numbers::pi * std::exp(t);
        j.dx = c * r;
        j.dxx = -r * (0.5 * s + c * c * one_minus_r / s);
        j.dt = std::isfinite(z) ? 2.0 * std::exp(t) * detail::g_value(z) : std::numbers::pi * std::exp(t);
        return j;
    }
};

/// f + eps * x; used to check that the identity harness detects a wrong f.
struct PerturbedComparison {
    double eps = 1e-6;

    double value(double x, double t) const { return ArctanComparison{}.value(x, t) + eps * x; }
    ComparisonJet jet(double x, double t) const {
        ComparisonJet j = ArctanComparison{}.jet(x, t);
        j.value += eps * x;
        j.dx += eps;
        return j;
    }
};

inline double f_eval(double x, double t) { return ArctanComparison{}.value(x, t); }
inline ComparisonJet f_jet(double x, double t) { return ArctanComparison{}.jet(x, t); }

/// Limit t -> +inf: the round-circle chord.
inline double circle_chord(double arc) { return 2.0 * std::sin(0.5 * arc); }

enum class RatioStatus { Round, Regular, Saturated };

struct RatioSolve {
    double a = 0.0;
    RatioStatus status = RatioStatus::Round;
};

inline constexpr double log_ratio_cap = 700.0;

/// Solves d = f(l, -log a) for a. Returns a = 0 when the chord is at least
/// the round-circle chord 2 sin(l/2). Bisection on log a over [-700, 700]
/// followed by a bracketed Newton polish on the closed-form df/dt.
inline RatioSolve a_solve_detailed(double chord, double arc) {
    if (!(chord > 0.0) || !(arc > 0.0) || arc > two_pi || chord > arc * (1.0 + 1e-9)) {
        throw Error(ErrorKind::DomainError, "a_solve needs 0 < d <= l",
                    "d=" + std::to_string(chord) + " l=" + std::to_string(arc));
    }
    if (chord >= circle_chord(arc)) return {0.0, RatioStatus::Round};

    const ArctanComparison f;
    // residual(u) = f(l, -u) - d is strictly decreasing in u = log a.
    auto residual = [&](double u) { return f.value(arc, -u) - chord; };
    double lo = -log_ratio_cap;
    double hi = log_ratio_cap;
    if (residual(hi) > 0.0) return {std::exp(log_ratio_cap), RatioStatus::Saturated};
    if (residual(lo) <= 0.0) return {std::exp(lo), RatioStatus::Regular};

    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) > 0.0 ? lo : hi) = mid;
    }
    double u = 0.5 * (lo + hi);
    for (int iter = 0; iter < 50; ++iter) {
        const ComparisonJet jt = f.jet(arc, -u);
        const double r = jt.value - chord;
        if (r == 0.0) break;
        (r > 0.0 ? lo : hi) = u;
        const double slope = -jt.dt;
        double next = slope < 0.0 ? u - r / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = next - u;
        u = next;
        if (std::abs(step) <= 1e-13 || hi - lo <= 1e-13) break;
    }
    return {std::exp(u), RatioStatus::Regular};
}

inline double a_solve(double chord, double arc) { return a_solve_detailed(chord, arc).a; }

/// Diagonal limit of the ratio: sqrt(max(k^2 - 1, 0) / 2).
/// Discrete curvature of a sampled circle is only 1 to about 1e-11; without a
/// floor the square root turns that into a spurious a of order 1e-6.
inline constexpr double diagonal_roundoff_floor = 1e-9;

inline double a_diagonal(double curvature) {
    const double excess = curvature * curvature - 1.0;
    if (excess <= diagonal_roundoff_floor) return 0.0;
    return std::sqrt(excess / 2.0);
}

/// tbar = log(abar); the round flag marks abar = 0, where the comparison
/// reduces to d >= 2 sin(l/2).
struct ComparisonOffset {
    double t_bar = -std::numeric_limits<double>::infinity();
    bool round = true;

    static ComparisonOffset from_ratio(double a_bar) {
        if (a_bar > 0.0) return {std::log(a_bar), false};
        return {};
    }
};

/// Z = d - f(l, t - tbar).
inline double z_eval(double chord, double arc, double t, const ComparisonOffset& offset) {
    if (!(arc > 0.0 && arc <= two_pi)) {
        throw Error(ErrorKind::DomainError, "z_eval needs 0 < l <= 2pi", "l=" + std::to_string(arc));
    }
    if (offset.round) return chord - circle_chord(arc);
    return chord - f_eval(arc, t - offset.t_bar);
}

struct ChordArcRecord {
    ChordArc geometry;
    double a = 0.0;
    double z = 0.0;
};

struct ProfileSummary {
    double a_bar = 0.0;
    ComparisonOffset offset;
    std::size_t arg_i = 0;
    std::size_t arg_j = 0;          // == arg_i when the sup is a diagonal value
    bool on_diagonal = true;
    double diagonal_max = 0.0;
    double off_diagonal_max = 0.0;
    std::size_t saturated_pairs = 0;
    std::optional<double> min_z;
    std::size_t min_z_i = 0;
    std::size_t min_z_j = 0;
};

struct ZQuery {
    double time = 0.0;
    ComparisonOffset offset;
};

struct MinZ {
    double value = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    std::size_t j = 0;
};

/// Minimum of Z over all distinct vertex pairs.
inline MinZ min_z(const CurveFrame& frame, double time, const ComparisonOffset& offset) {
    const std::size_t n = frame.size();
    MinZ out;
    const double shift = time - offset.t_bar;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double arc = shorter_arc(frame, i, j);
            const double chord = norm(frame.positions[j] - frame.positions[i]);
            const double z = offset.round ? chord - circle_chord(arc) : chord - f_eval(arc, shift);
            if (z < out.value) out = {z, i, j};
        }
    }
    return out;
}

/// Supremum of the ratio a over all vertex pairs and all diagonal values.
/// A pair is only solved when its chord lies below f(l, -log a_current), so
/// the cost is one comparison-function evaluation for most pairs.
inline ProfileSummary profile(const CurveFrame& frame, std::optional<ZQuery> query = std::nullopt) {
    const std::size_t n = frame.size();
    ProfileSummary out;
    for (std::size_t i = 0; i < n; ++i) {
        const double ad = a_diagonal(frame.curvature[i]);
        if (ad > out.diagonal_max) {
            out.diagonal_max = ad;
            if (ad > out.a_bar) {
                out.a_bar = ad;
                out.arg_i = out.arg_j = i;
                out.on_diagonal = true;
            }
        }
    }

    double best_off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double arc = shorter_arc(frame, i, j);
            const double chord = norm(frame.positions[j] - frame.positions[i]);
            if (chord >= circle_chord(arc)) continue;
            if (best_off > 0.0 && chord >= f_eval(arc, -std::log(best_off))) continue;
            const RatioSolve rs = a_solve_detailed(chord, arc);
            if (rs.status == RatioStatus::Saturated) ++out.saturated_pairs;
            if (rs.a > best_off) best_off = rs.a;
            if (rs.a > out.a_bar) {
                out.a_bar = rs.a;
                out.arg_i = i;
                out.arg_j = j;
                out.on_diagonal = false;
            }
        }
    }
    out.off_diagonal_max = best_off;
    out.offset = ComparisonOffset::from_ratio(out.a_bar);

    if (query) {
        const MinZ mz = min_z(frame, query->time, query->offset);
        out.min_z = mz.value;
        out.min_z_i = mz.i;
        out.min_z_j = mz.j;
    }
    return out;
}

/// Every distinct pair with chord, shorter arc, ratio and Z for `query`.
inline std::vector<ChordArcRecord> pair_table(const CurveFrame& frame, const ZQuery& query) {
    const std::size_t n = frame.size();
    std::vector<ChordArcRecord> rows;
    rows.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            ChordArcRecord rec;
            rec.geometry = chord_arc(frame, i, j);
            rec.a = a_solve(rec.geometry.chord, rec.geometry.arc);
            rec.z = z_eval(rec.geometry.chord, rec.geometry.arc, query.time, query.offset);
            rows.push_back(rec);
        }
    }
    return rows;
}

} // namespace csf
