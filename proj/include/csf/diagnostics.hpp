#pragma once

// Bounds evaluated along normalized trajectories: the chord-arc comparison,
// exponential decay of the ratio supremum, the curvature bound, the L2
// curvature deviation, and convergence to a round circle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "csf/comparison.hpp"
#include "csf/dynamics.hpp"

namespace csf {

struct BoundSample {
    double time = 0.0;
    double measured = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - measured
    bool skipped = false;
};

/// Upper-bound check: passes iff every non-skipped sample has
/// measured <= bound * (1 + relative_tolerance) + absolute_tolerance.
struct BoundReport {
    std::string name;
    std::vector<BoundSample> series;
    double relative_tolerance = 0.0;
    double absolute_tolerance = 0.0;
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_time = 0.0;
    bool passed = true;

    void add(double time, double measured, double bound) {
        BoundSample s{time, measured, bound, bound - measured, false};
        series.push_back(s);
        if (s.margin < worst_margin) {
            worst_margin = s.margin;
            worst_time = time;
        }
        if (!(measured <= bound * (1.0 + relative_tolerance) + absolute_tolerance)) passed = false;
    }
    void skip(double time) { series.push_back({time, 0.0, 0.0, 0.0, true}); }
};

inline void require_normalized(const Trajectory& traj) {
    if (traj.kind != RunKind::Normalized) {
        throw Error(ErrorKind::WrongRunKind, "diagnostic needs a normalized trajectory");
    }
    if (traj.snapshots.empty()) throw Error(ErrorKind::WrongRunKind, "empty trajectory");
}

/// Discretization credit for pairwise comparisons: 10 (2pi/N)^2.
inline double geometric_tolerance(std::size_t n) {
    const double h = two_pi / static_cast<double>(n);
    return 10.0 * h * h;
}

/// Offset taken from the first snapshot only.
inline ComparisonOffset initial_offset(const Trajectory& traj) {
    require_normalized(traj);
    return profile(traj.front().frame).offset;
}

struct DistanceComparisonReport {
    BoundReport bound;
    ComparisonOffset offset;
    double min_z = std::numeric_limits<double>::infinity();
    double min_z_time = 0.0;
    std::size_t min_z_i = 0;
    std::size_t min_z_j = 0;
};

/// Z = d - f(l, t - tbar) >= -10 (2pi/N)^2 over every snapshot and pair.
/// Recorded as measured = -min Z against bound 0.
inline DistanceComparisonReport check_distance_comparison(const Trajectory& traj) {
    require_normalized(traj);
    DistanceComparisonReport out;
    out.offset = initial_offset(traj);
    out.bound.name = "distance comparison";
    out.bound.absolute_tolerance = geometric_tolerance(traj.front().frame.size());
    for (const Snapshot& s : traj.snapshots) {
        const MinZ mz = min_z(s.frame, s.time, out.offset);
        out.bound.add(s.time, -mz.value, 0.0);
        if (mz.value < out.min_z) {
            out.min_z = mz.value;
            out.min_z_time = s.time;
            out.min_z_i = mz.i;
            out.min_z_j = mz.j;
        }
    }
    return out;
}

struct AbarSeries {
    std::vector<double> time;
    std::vector<double> a_bar;
};

inline AbarSeries abar_series(const Trajectory& traj) {
    AbarSeries out;
    for (const Snapshot& s : traj.snapshots) {
        out.time.push_back(s.time);
        out.a_bar.push_back(profile(s.frame).a_bar);
    }
    return out;
}

inline constexpr double abar_log_tolerance = 0.05;

/// log abar(t) <= tbar - t + 0.05, skipping snapshots where abar(t) = 0.
inline BoundReport check_abar_decay(const Trajectory& traj, const AbarSeries& series) {
    require_normalized(traj);
    BoundReport rep;
    rep.name = "abar decay";
    rep.absolute_tolerance = abar_log_tolerance;
    const double a0 = series.a_bar.front();
    for (std::size_t k = 0; k < series.time.size(); ++k) {
        const double a = series.a_bar[k];
        if (!(a > 0.0) || !(a0 > 0.0)) {
            rep.skip(series.time[k]);
            continue;
        }
        rep.add(series.time[k], std::log(a), std::log(a0) - series.time[k]);
    }
    return rep;
}

inline BoundReport check_abar_decay(const Trajectory& traj) { return check_abar_decay(traj, abar_series(traj)); }

inline constexpr double curvature_bound_tolerance = 0.02;

/// k_max(t)^2 <= (1 + 2 exp(-2 (t - tbar))) (1 + 0.02); in the round case the
/// bound is 1.
inline BoundReport check_curvature_bound(const Trajectory& traj, const ComparisonOffset& offset) {
    require_normalized(traj);
    BoundReport rep;
    rep.name = "curvature bound";
    rep.relative_tolerance = curvature_bound_tolerance;
    for (const Snapshot& s : traj.snapshots) {
        const double k = std::max(std::abs(s.frame.max_curvature()), std::abs(s.frame.min_curvature()));
        const double bound = offset.round ? 1.0 : 1.0 + 2.0 * std::exp(-2.0 * (s.time - offset.t_bar));
        rep.add(s.time, k * k, bound);
    }
    return rep;
}

inline BoundReport check_curvature_bound(const Trajectory& traj) {
    return check_curvature_bound(traj, initial_offset(traj));
}

struct ConvergenceSample {
    double time = 0.0;
    double l2_deviation = 0.0;          // sum (k-1)^2 w
    double l2_identity_residual = 0.0;  // |sum (k-1)^2 w - (sum k^2 w - 4pi + L)|
    double sup_deviation = 0.0;         // max |k - 1|
    Vec2 center;
    double radius = 0.0;
    double fit_deviation = 0.0;         // max | |F - c| - radius |
    double unit_deviation = 0.0;        // max | |F - c| - 1 |
    double sup_dk_ds = 0.0;             // max |k_{i+1} - k_i| / |e_i|
};

inline ConvergenceSample convergence_sample(const Snapshot& s) {
    const CurveFrame& fr = s.frame;
    const std::size_t n = fr.size();
    ConvergenceSample out;
    out.time = s.time;
    double k2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double k = fr.curvature[i];
        const double w = fr.dual_lengths[i];
        out.l2_deviation += (k - 1.0) * (k - 1.0) * w;
        k2 += k * k * w;
        out.sup_deviation = std::max(out.sup_deviation, std::abs(k - 1.0));
        const double dk = std::abs(fr.curvature[(i + 1) % n] - k) / fr.edge_lengths[i];
        out.sup_dk_ds = std::max(out.sup_dk_ds, dk);
    }
    out.l2_identity_residual = std::abs(out.l2_deviation - (k2 - 2.0 * two_pi + fr.length));
    out.center = vertex_centroid(fr.positions);
    for (Vec2 p : fr.positions) out.radius += norm(p - out.center);
    out.radius /= static_cast<double>(n);
    for (Vec2 p : fr.positions) {
        const double r = norm(p - out.center);
        out.fit_deviation = std::max(out.fit_deviation, std::abs(r - out.radius));
        out.unit_deviation = std::max(out.unit_deviation, std::abs(r - 1.0));
    }
    return out;
}

inline constexpr double l2_bound_tolerance = 0.05;
inline constexpr double l2_identity_tolerance = 1e-8;

struct ConvergenceMetrics {
    std::vector<ConvergenceSample> samples;
    BoundReport l2_bound;
    double max_identity_residual = 0.0;
    bool identity_passed = true;
};

/// Per-snapshot convergence metrics plus the L2 bound
/// int (k-1)^2 ds <= 2 exp(-2 (t - tbar)) (1 + 0.05). In the round case the
/// bound degenerates to 0 and the pairwise discretization credit is used.
inline ConvergenceMetrics convergence_metrics(const Trajectory& traj, const ComparisonOffset& offset) {
    require_normalized(traj);
    ConvergenceMetrics out;
    out.l2_bound.name = "L2 curvature deviation";
    out.l2_bound.relative_tolerance = l2_bound_tolerance;
    if (offset.round) out.l2_bound.absolute_tolerance = geometric_tolerance(traj.front().frame.size());
    for (const Snapshot& s : traj.snapshots) {
        ConvergenceSample c = convergence_sample(s);
        const double bound = offset.round ? 0.0 : 2.0 * std::exp(-2.0 * (s.time - offset.t_bar));
        out.l2_bound.add(s.time, c.l2_deviation, bound);
        out.max_identity_residual = std::max(out.max_identity_residual, c.l2_identity_residual);
        out.samples.push_back(c);
    }
    out.identity_passed = out.max_identity_residual <= l2_identity_tolerance;
    return out;
}

inline ConvergenceMetrics convergence_metrics(const Trajectory& traj) {
    return convergence_metrics(traj, initial_offset(traj));
}

struct DerivativeDecay {
    std::vector<double> time;
    std::vector<double> sup_dk_ds;
    double fitted_rate = std::numeric_limits<double>::quiet_NaN();
    bool flagged = false;  // fitted rate below 0.5
    bool negligible = false;  // sup |dk/ds| stays below 1e-6: nothing to fit
};

/// Informational: least-squares fit of log sup|dk/ds| against t over
/// [1, t_end]. No pass/fail; flagged when the fitted rate is below 0.5.
inline DerivativeDecay derivative_decay(const Trajectory& traj, double fit_start = 1.0) {
    require_normalized(traj);
    DerivativeDecay out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    double peak = 0.0;
    for (const Snapshot& s : traj.snapshots) {
        const double v = convergence_sample(s).sup_dk_ds;
        out.time.push_back(s.time);
        out.sup_dk_ds.push_back(v);
        peak = std::max(peak, v);
        if (s.time >= fit_start && v > 0.0) {
            const double y = std::log(v);
            sx += s.time; sy += y; sxx += s.time * s.time; sxy += s.time * y; ++m;
        }
    }
    out.negligible = peak < 1e-6;
    if (m >= 2 && !out.negligible) {
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        out.fitted_rate = -slope;
        out.flagged = out.fitted_rate < 0.5;
    }
    return out;
}

/// First snapshot time at which the curve is convex (k_min > 0), if any.
inline std::optional<double> convexity_time(const Trajectory& traj) {
    for (const Snapshot& s : traj.snapshots) {
        if (s.frame.min_curvature() > 0.0) return s.time;
    }
    return std::nullopt;
}

/// Monotone-margin observation for the curvature bound after t = 1
/// (empirical; reported, never asserted).
inline bool margin_nondecreasing_after(const BoundReport& rep, double start = 1.0) {
    double prev = -std::numeric_limits<double>::infinity();
    for (const BoundSample& s : rep.series) {
        if (s.skipped || s.time < start) continue;
        if (s.margin < prev) return false;
        prev = s.margin;
    }
    return true;
}

} // namespace csf
