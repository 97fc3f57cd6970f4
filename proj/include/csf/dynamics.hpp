#pragma once

// Time integration of curve shortening flow
//
//     dF/dtau = -k nu                    (un-normalized)
//     dF/dt   = <k^2> F - k nu           (normalized to length 2pi)
//
// and the exact change of variables between the two.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csf/cyclic_tridiagonal.hpp"
#include "csf/error.hpp"
#include "csf/geometry.hpp"

namespace csf {

enum class Scheme { Explicit, SemiImplicit };
enum class RunKind { Normalized, Unnormalized };
enum class StepPolicy { Fixed, Adaptive };

enum class Termination { ReachedEnd, SelfIntersection, CurvatureBlowup, StepFailure };

constexpr std::string_view to_string(Scheme s) { return s == Scheme::Explicit ? "explicit" : "semi-implicit"; }
constexpr std::string_view to_string(RunKind k) { return k == RunKind::Normalized ? "normalized" : "unnormalized"; }
constexpr std::string_view to_string(StepPolicy p) { return p == StepPolicy::Fixed ? "fixed" : "adaptive"; }
constexpr std::string_view to_string(Termination t) {
    switch (t) {
    case Termination::ReachedEnd: return "reached_end";
    case Termination::SelfIntersection: return "self_intersection";
    case Termination::CurvatureBlowup: return "curvature_blowup";
    case Termination::StepFailure: return "step_failure";
    }
    return "unknown";
}

/// Explicit steps are always additionally limited to this factor times the
/// squared minimum edge length.
inline constexpr double explicit_stability_factor = 0.25;

/// Un-normalized runs stop once the length falls below this fraction of the
/// initial length. Without it a semi-implicit step shrinks a near-circle
/// geometrically and the run never reaches the extinction time.
inline constexpr double extinction_length_ratio = 1e-4;

struct FlowConfig {
    std::size_t vertex_count = 512;
    RunKind kind = RunKind::Normalized;
    Scheme scheme = Scheme::SemiImplicit;
    StepPolicy policy = StepPolicy::Fixed;
    double dt = 1e-3;            // fixed step, or the cap for the adaptive policy
    double safety = 0.25;        // adaptive: dt = min(cap, safety / k_max^2)
    std::size_t resample_interval = 20;
    double end_time = 6.0;       // t for normalized runs, tau for un-normalized runs
    std::size_t snapshot_interval = 10;
    std::size_t embed_check_interval = 1;
    std::size_t max_steps = 50'000'000;
    double blowup_resolution = 1.0;  // stop when k_max * mean edge exceeds this

    void validate() const {
        auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigError, what); };
        if (vertex_count < min_vertex_count) fail("vertex count must be at least 8");
        if (!(dt > 0.0)) fail("dt must be positive");
        if (!(safety > 0.0 && safety <= 0.5)) fail("safety factor must lie in (0, 0.5]");
        if (resample_interval < 1) fail("resample interval must be at least 1");
        if (snapshot_interval < 1) fail("snapshot interval must be at least 1");
        if (embed_check_interval < 1) fail("embeddedness check interval must be at least 1");
        if (!(end_time > 0.0)) fail("end time must be positive");
    }

    friend bool operator==(const FlowConfig&, const FlowConfig&) = default;
};

struct Snapshot {
    double time = 0.0;
    std::size_t step = 0;
    DiscreteCurve curve;
    CurveFrame frame;

    static Snapshot make(DiscreteCurve c, double time, std::size_t step) {
        Snapshot s;
        s.time = time;
        s.step = step;
        s.frame = build_frame(c);
        s.curve = std::move(c);
        return s;
    }
};

struct Trajectory {
    RunKind kind = RunKind::Normalized;
    std::vector<Snapshot> snapshots;
    Termination termination = Termination::ReachedEnd;
    std::string message;
    std::size_t steps = 0;

    const Snapshot& front() const { return snapshots.front(); }
    const Snapshot& back() const { return snapshots.back(); }
};

/// Sampled correspondence between un-normalized time tau and normalized
/// time t, with the scale factor lambda = L / 2pi.
struct ClockMap {
    double initial_length = 0.0;
    std::vector<double> tau;
    std::vector<double> t;
    std::vector<double> lambda;
};

namespace detail {

inline void check_finite(std::span<const Vec2> pts) {
    for (Vec2 p : pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw Error(ErrorKind::NumericalBlowup, "non-finite vertex after step");
        }
    }
}

/// Solves (I - dt D_ss) X = rhs per coordinate; D_ss is the three-point
/// second difference on the current non-uniform arclength mesh.
inline std::vector<Vec2> implicit_diffusion(const CurveFrame& fr, double dt, double rhs_scale) {
    const std::size_t n = fr.size();
    std::vector<double> lower(n), diag(n), upper(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t prev = (i + n - 1) % n;
        const double a = 1.0 / (fr.dual_lengths[i] * fr.edge_lengths[prev]);
        const double c = 1.0 / (fr.dual_lengths[i] * fr.edge_lengths[i]);
        lower[i] = -dt * a;
        upper[i] = -dt * c;
        diag[i] = 1.0 + dt * (a + c);
    }
    const CyclicTridiagonal solver(std::move(lower), std::move(diag), std::move(upper));
    std::vector<double> bx(n), by(n), x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        bx[i] = rhs_scale * fr.positions[i].x;
        by[i] = rhs_scale * fr.positions[i].y;
    }
    solver.solve(bx, x);
    solver.solve(by, y);
    std::vector<Vec2> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {x[i], y[i]};
    return out;
}

inline Snapshot finish_step(std::vector<Vec2> pts, const Snapshot& prev, double dt, bool check_embedded) {
    check_finite(pts);
    DiscreteCurve next(std::move(pts));
    if (check_embedded && !is_embedded(next)) {
        throw Error(ErrorKind::SelfIntersection, "self-intersection after step",
                    "step=" + std::to_string(prev.step + 1));
    }
    return Snapshot::make(std::move(next), prev.time + dt, prev.step + 1);
}

} // namespace detail

/// One step of dF/dtau = -k nu.
inline Snapshot step_unnormalized(const Snapshot& snap, double dt, Scheme scheme = Scheme::SemiImplicit,
                                  bool check_embedded = true) {
    const CurveFrame& fr = snap.frame;
    std::vector<Vec2> pts;
    if (scheme == Scheme::Explicit) {
        pts = fr.positions;
        for (std::size_t i = 0; i < pts.size(); ++i) pts[i] -= dt * fr.curvature[i] * fr.normals[i];
    } else {
        pts = detail::implicit_diffusion(fr, dt, 1.0);
    }
    return detail::finish_step(std::move(pts), snap, dt, check_embedded);
}

/// One step of dF/dt = <k^2> F - k nu, followed by an exact dilation about
/// the origin back to length 2pi.
inline Snapshot step_normalized(const Snapshot& snap, double dt, Scheme scheme = Scheme::SemiImplicit,
                                bool check_embedded = true) {
    const CurveFrame& fr = snap.frame;
    const double avg_k2 = fr.mean_sq_curvature;
    std::vector<Vec2> pts;
    if (scheme == Scheme::Explicit) {
        pts = fr.positions;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            pts[i] += dt * (avg_k2 * fr.positions[i] - fr.curvature[i] * fr.normals[i]);
        }
    } else {
        pts = detail::implicit_diffusion(fr, dt, 1.0 + dt * avg_k2);
    }
    detail::check_finite(pts);
    const double factor = two_pi / polygon_length(pts);
    for (Vec2& p : pts) p *= factor;
    return detail::finish_step(std::move(pts), snap, dt, check_embedded);
}

namespace detail {

inline double choose_dt(const FlowConfig& cfg, const CurveFrame& fr) {
    double dt = cfg.dt;
    if (cfg.policy == StepPolicy::Adaptive) {
        const double kmax = std::max(std::abs(fr.max_curvature()), std::abs(fr.min_curvature()));
        if (kmax > 0.0) dt = std::min(dt, cfg.safety / (kmax * kmax));
    }
    if (cfg.scheme == Scheme::Explicit) {
        const double h = fr.min_edge();
        dt = std::min(dt, explicit_stability_factor * h * h);
    }
    return dt;
}

inline Termination classify(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::SelfIntersection:
    case ErrorKind::NotEmbedded:
    case ErrorKind::ResampleFailure: return Termination::SelfIntersection;
    case ErrorKind::NumericalBlowup: return Termination::CurvatureBlowup;
    default: return Termination::StepFailure;
    }
}

} // namespace detail

/// Integrates from `initial` (resampled to the configured vertex count, and
/// scaled to length 2pi for normalized runs) until the end time or the
/// first failure. Only a non-embedded initial curve is rejected by throwing;
/// every later failure ends the run and is recorded as its termination.
inline Trajectory run(const FlowConfig& cfg, const DiscreteCurve& initial) {
    cfg.validate();
    require_embedded(initial);

    Trajectory traj;
    traj.kind = cfg.kind;
    DiscreteCurve start = resample_uniform(initial, cfg.vertex_count);
    if (cfg.kind == RunKind::Normalized) start = canonical_scale(start);
    Snapshot cur = Snapshot::make(std::move(start), 0.0, 0);
    traj.snapshots.push_back(cur);

    const double end = cfg.end_time;
    const double time_eps = 1e-12 * std::max(1.0, end);
    bool recorded_last = true;
    try {
        while (cur.time < end - time_eps) {
            if (cur.step >= cfg.max_steps) {
                traj.termination = Termination::StepFailure;
                traj.message = "step limit reached";
                break;
            }
            if (cfg.kind == RunKind::Unnormalized &&
                cur.frame.length < extinction_length_ratio * traj.front().frame.length) {
                traj.termination = Termination::CurvatureBlowup;
                traj.message = "curve has shrunk to a point";
                break;
            }
            const double resolution = std::max(std::abs(cur.frame.max_curvature()),
                                               std::abs(cur.frame.min_curvature())) * cur.frame.mean_edge();
            if (resolution > cfg.blowup_resolution) {
                traj.termination = Termination::CurvatureBlowup;
                traj.message = "curvature no longer resolved by the mesh";
                break;
            }
            double dt = detail::choose_dt(cfg, cur.frame);
            if (cur.time + dt > end - time_eps) dt = end - cur.time;

            const bool check = (cur.step + 1) % cfg.embed_check_interval == 0;
            cur = cfg.kind == RunKind::Normalized ? step_normalized(cur, dt, cfg.scheme, check)
                                                  : step_unnormalized(cur, dt, cfg.scheme, check);
            if (cur.time >= end - time_eps) cur.time = end;

            if (cur.step % cfg.resample_interval == 0) {
                DiscreteCurve c = resample_uniform(cur.curve, cfg.vertex_count);
                if (cfg.kind == RunKind::Normalized) c = canonical_scale(c);
                cur = Snapshot::make(std::move(c), cur.time, cur.step);
            }
            recorded_last = false;
            if (cur.step % cfg.snapshot_interval == 0) {
                traj.snapshots.push_back(cur);
                recorded_last = true;
            }
        }
    } catch (const Error& e) {
        traj.termination = detail::classify(e.kind());
        traj.message = e.what();
    }
    if (!recorded_last) traj.snapshots.push_back(cur);
    traj.steps = cur.step;
    return traj;
}

/// Rescales each snapshot of an un-normalized run to length 2pi and maps
/// tau to t = int_0^tau (2pi / L)^2 by the trapezoidal rule on the
/// snapshot grid.
struct NormalizedRun {
    Trajectory trajectory;
    ClockMap clock;
};

inline NormalizedRun normalize_trajectory(const Trajectory& unnorm) {
    if (unnorm.kind != RunKind::Unnormalized) {
        throw Error(ErrorKind::WrongRunKind, "normalize_trajectory needs an un-normalized run");
    }
    NormalizedRun out;
    out.trajectory.kind = RunKind::Normalized;
    out.trajectory.termination = unnorm.termination;
    out.trajectory.message = unnorm.message;
    out.trajectory.steps = unnorm.steps;
    ClockMap& clock = out.clock;
    clock.initial_length = unnorm.front().frame.length;

    double t = 0.0;
    double prev_rate = 0.0;
    for (std::size_t k = 0; k < unnorm.snapshots.size(); ++k) {
        const Snapshot& s = unnorm.snapshots[k];
        const double len = s.frame.length;
        const double rate = (two_pi / len) * (two_pi / len);
        if (k > 0) t += 0.5 * (s.time - unnorm.snapshots[k - 1].time) * (rate + prev_rate);
        prev_rate = rate;
        clock.tau.push_back(s.time);
        clock.t.push_back(t);
        clock.lambda.push_back(len / two_pi);
        out.trajectory.snapshots.push_back(Snapshot::make(scaled(s.curve, two_pi / len), t, s.step));
    }
    return out;
}

/// Inverse map: lambda(t) = (L0 / 2pi) exp(-int_0^t <k^2>), F~ = lambda F,
/// tau = int_0^t lambda^2, both integrals trapezoidal on the snapshot grid.
inline NormalizedRun recover_unnormalized(const Trajectory& norm, double initial_length) {
    if (norm.kind != RunKind::Normalized) {
        throw Error(ErrorKind::WrongRunKind, "recover_unnormalized needs a normalized run");
    }
    NormalizedRun out;
    out.trajectory.kind = RunKind::Unnormalized;
    out.trajectory.termination = norm.termination;
    out.trajectory.message = norm.message;
    out.trajectory.steps = norm.steps;
    ClockMap& clock = out.clock;
    clock.initial_length = initial_length;

    double k2_integral = 0.0;
    double tau = 0.0;
    double prev_k2 = 0.0;
    double prev_lambda2 = 0.0;
    for (std::size_t k = 0; k < norm.snapshots.size(); ++k) {
        const Snapshot& s = norm.snapshots[k];
        const double avg_k2 = s.frame.mean_sq_curvature;
        if (k > 0) {
            const double h = s.time - norm.snapshots[k - 1].time;
            k2_integral += 0.5 * h * (avg_k2 + prev_k2);
        }
        const double lambda = initial_length / two_pi * std::exp(-k2_integral);
        if (k > 0) {
            const double h = s.time - norm.snapshots[k - 1].time;
            tau += 0.5 * h * (lambda * lambda + prev_lambda2);
        }
        prev_k2 = avg_k2;
        prev_lambda2 = lambda * lambda;
        clock.t.push_back(s.time);
        clock.tau.push_back(tau);
        clock.lambda.push_back(lambda);
        out.trajectory.snapshots.push_back(Snapshot::make(scaled(s.curve, lambda), tau, s.step));
    }
    return out;
}

} // namespace csf
