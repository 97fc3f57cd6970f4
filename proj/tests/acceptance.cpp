// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance [--out DIR] [--only K[,K...]]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csf/analytic.hpp"
#include "csf/diagnostics.hpp"
#include "csf/dynamics.hpp"
#include "csf/generators.hpp"
#include "csf/harness.hpp"
#include "csf/identities.hpp"

using namespace csf;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void info(const std::string& what) { notes.push_back("info " + what); }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double mean_radius(const CurveFrame& fr) {
    const Vec2 c = vertex_centroid(fr.positions);
    double r = 0.0;
    for (Vec2 p : fr.positions) r += norm(p - c);
    return r / static_cast<double>(fr.size());
}

double max_abs_curvature(const CurveFrame& fr) { return std::max(std::abs(fr.max_curvature()), std::abs(fr.min_curvature())); }

Trajectory flow(const DiscreteCurve& c, std::size_t n, double t_end) {
    FlowConfig cfg;
    cfg.vertex_count = n;
    cfg.end_time = t_end;
    return run(cfg, c);
}

// Criteria 4-7 on one normalized run.
struct FlagshipResult {
    double a_bar0 = 0.0;
    double t_bar = 0.0;
    double min_z = 0.0;
    double z_tolerance = 0.0;
    bool reached_end = false;
    bool distance = false, abar = false, curvature = false, l2 = false;
    double abar_margin = 0.0, curvature_margin = 0.0, l2_margin = 0.0;
    std::optional<double> convex_at;
    ConvergenceSample last;
    double seconds = 0.0;
};

FlagshipResult flagship(const std::string& name, const DiscreteCurve& c, std::size_t n) {
    const auto t0 = Clock::now();
    FlagshipResult r;
    const Trajectory tr = flow(c, n, 6.0);
    r.reached_end = tr.termination == Termination::ReachedEnd && tr.back().time == 6.0;
    const DistanceComparisonReport dc = check_distance_comparison(tr);
    r.a_bar0 = profile(tr.front().frame).a_bar;
    r.t_bar = dc.offset.t_bar;
    r.min_z = dc.min_z;
    r.z_tolerance = geometric_tolerance(n);
    r.distance = !dc.offset.round && dc.min_z >= -r.z_tolerance;

    // Criterion 5 recomputed directly: log abar(t) <= log abar(0) - t + 0.05.
    const AbarSeries series = abar_series(tr);
    r.abar = series.a_bar.front() > 0.0;
    r.abar_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < series.time.size(); ++k) {
        if (!(series.a_bar[k] > 0.0)) continue;
        const double m = std::log(series.a_bar.front()) - series.time[k] + 0.05 - std::log(series.a_bar[k]);
        r.abar_margin = std::min(r.abar_margin, m);
    }
    r.abar = r.abar && r.abar_margin >= 0.0 && check_abar_decay(tr, series).passed;

    r.curvature_margin = std::numeric_limits<double>::infinity();
    r.l2_margin = std::numeric_limits<double>::infinity();
    for (const Snapshot& s : tr.snapshots) {
        const double decay = 2.0 * std::exp(-2.0 * (s.time - r.t_bar));
        const double k = max_abs_curvature(s.frame);
        r.curvature_margin = std::min(r.curvature_margin, (1.0 + decay) * 1.02 - k * k);
        double l2 = 0.0;
        for (std::size_t i = 0; i < s.frame.size(); ++i) {
            const double dk = s.frame.curvature[i] - 1.0;
            l2 += dk * dk * s.frame.dual_lengths[i];
        }
        r.l2_margin = std::min(r.l2_margin, decay * 1.05 - l2);
    }
    r.curvature = r.curvature_margin >= 0.0 && check_curvature_bound(tr, dc.offset).passed;
    const ConvergenceMetrics cm = convergence_metrics(tr, dc.offset);
    r.l2 = r.l2_margin >= 0.0 && cm.l2_bound.passed;
    r.last = cm.samples.back();
    r.convex_at = convexity_time(tr);
    r.seconds = seconds_since(t0);
    std::printf("  [%s N=%zu] steps=%zu snapshots=%zu abar0=%.6f tbar=%.6f minZ=%.3e (tol %.3e) %.1fs\n", name.c_str(), n,
                tr.steps, tr.snapshots.size(), r.a_bar0, r.t_bar, r.min_z, r.z_tolerance, r.seconds);
    return r;
}

std::map<std::pair<std::string, std::size_t>, FlagshipResult> flagship_cache;

const FlagshipResult& flagship_cached(const std::string& name, std::size_t n) {
    const auto key = std::make_pair(name, n);
    auto it = flagship_cache.find(key);
    if (it != flagship_cache.end()) return it->second;
    const DiscreteCurve c = name == "ellipse" ? make_ellipse(2.0, 1.0, n) : make_dumbbell(0.2, n);
    return flagship_cache.emplace(key, flagship(name, c, n)).first->second;
}

// ---------------------------------------------------------------------------

Verdict criterion_identities() {
    Verdict v;
    const auto t0 = Clock::now();
    IdentityGrid grid;  // 400 x 101
    const IdentityReport lt = check_Ltilde(grid, ArctanComparison{});
    v.require(lt.max_residual < 1e-9, "max |Ltilde f| = " + fmt("%.3e", lt.max_residual) + " < 1e-9");

    // Arc lengths up to half the curve: x in (0, pi], where 0 <= f' <= 1.
    // Recomputed as the difference of the two full operators.
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < grid.nx; ++a) {
        const double x = grid.x(a);
        if (x > std::numbers::pi) break;
        for (std::size_t b = 0; b < grid.nt; ++b) {
            const ComparisonJet j = f_jet(x, grid.t(b));
            min_gap = std::min(min_gap, l_value(j, x) - ltilde_value(j, x));
        }
    }
    const IdentityReport ld = check_L_dominates(grid, ArctanComparison{});
    v.require(min_gap >= -1e-10 && ld.passed, "min (Lf - Ltilde f) = " + fmt("%.3e", min_gap) + " >= -1e-10");

    // g(z) = atan z - z/(1+z^2) > 0: independent scan alongside the library check.
    bool g_ok = check_g_positive().passed;
    for (int i = 1; i <= 4000; ++i) {
        const double z = std::pow(10.0, -6.0 + 12.0 * i / 4000.0);
        if (!(g_eval(z) > 0.0)) g_ok = false;
    }
    v.require(g_ok, "g(z) > 0 for z > 0");

    // h(z) = arccos^2 z: second difference on [0, 1).
    bool h_ok = check_h_convexity().passed;
    const double hz = 1e-4;
    for (double z = hz; z < 0.999; z += 1e-3) {
        const double d2 = std::acos(z - hz) * std::acos(z - hz) - 2 * std::acos(z) * std::acos(z) +
                          std::acos(z + hz) * std::acos(z + hz);
        if (d2 < -1e-12) h_ok = false;
    }
    v.require(h_ok, "h'' >= 0 on [0, 1)");

    const IdentityReport shape = check_f_shape(grid, ArctanComparison{});
    double sym = 0.0;
    for (double t : {-3.0, 0.0, 2.5}) {
        for (double x = 0.05; x < two_pi; x += 0.05) sym = std::max(sym, std::abs(f_eval(x, t) - f_eval(two_pi - x, t)));
    }
    v.require(shape.passed && sym < 1e-12, "f symmetric (" + fmt("%.1e", sym) + "), concave, increasing in t");

    const IdentityReport fd = check_derivatives_fd(grid, 20, 20240611, ArctanComparison{});
    v.require(fd.passed, "closed-form derivatives match finite differences (" + fmt("%.2e", fd.max_residual) + ")");

    const double secs = seconds_since(t0);
    v.require(secs < 5.0, "runtime " + fmt("%.2f", secs) + " s < 5 s");
    return v;
}

Verdict criterion_circle_fixed_point() {
    Verdict v;
    const auto t0 = Clock::now();
    FlowConfig cfg;
    cfg.vertex_count = 256;
    cfg.scheme = Scheme::SemiImplicit;
    cfg.dt = 1e-3;
    cfg.end_time = 2.0;
    const Trajectory tr = run(cfg, make_circle(1.0, 256));
    v.require(tr.termination == Termination::ReachedEnd, "run reached t = 2");
    double disp = 0.0;
    for (const Snapshot& s : tr.snapshots) {
        for (std::size_t i = 0; i < s.curve.size(); ++i) disp = std::max(disp, norm(s.curve[i] - tr.front().curve[i]));
    }
    v.require(disp < 1e-6, "max vertex displacement " + fmt("%.3e", disp) + " < 1e-6");

    const DistanceComparisonReport dc = check_distance_comparison(tr);
    const AbarSeries ab = abar_series(tr);
    bool abar_zero = true;
    for (double a : ab.a_bar) abar_zero = abar_zero && a == 0.0;
    v.require(dc.offset.round && abar_zero, "abar = 0 on every snapshot (round)");
    v.require(dc.min_z >= -1e-9, "min Z = " + fmt("%.3e", dc.min_z) + " >= 0 up to roundoff");
    v.require(check_curvature_bound(tr).passed, "k_max^2 <= 1");
    const ConvergenceMetrics cm = convergence_metrics(tr);
    double l2 = 0.0, sup = 0.0, fit = 0.0;
    for (const ConvergenceSample& s : cm.samples) {
        l2 = std::max(l2, s.l2_deviation);
        sup = std::max(sup, s.sup_deviation);
        fit = std::max(fit, s.fit_deviation);
    }
    v.require(l2 < 1e-9 && sup < 1e-9 && fit < 1e-9,
              "int (k-1)^2 = " + fmt("%.1e", l2) + ", max|k-1| = " + fmt("%.1e", sup) + ", fit = " + fmt("%.1e", fit));
    const double secs = seconds_since(t0);
    v.require(secs < 10.0, "runtime " + fmt("%.2f", secs) + " s < 10 s");
    return v;
}

Verdict criterion_shrinking_circle() {
    Verdict v;
    const auto t0 = Clock::now();
    for (Scheme scheme : {Scheme::Explicit, Scheme::SemiImplicit}) {
        FlowConfig cfg;
        cfg.vertex_count = 256;
        cfg.kind = RunKind::Unnormalized;
        cfg.scheme = scheme;
        cfg.dt = 1e-4;
        cfg.end_time = 0.45;
        cfg.snapshot_interval = 50;
        cfg.embed_check_interval = 50;
        const Trajectory tr = run(cfg, make_circle(1.0, 256));
        double worst = 0.0;
        for (const Snapshot& s : tr.snapshots) {
            worst = std::max(worst, std::abs(mean_radius(s.frame) - std::sqrt(1.0 - 2.0 * s.time)));
        }
        v.require(tr.termination == Termination::ReachedEnd && tr.back().time == 0.45 && worst < 1e-3,
                  std::string(to_string(scheme)) + ": |R - sqrt(1 - 2 tau)| = " + fmt("%.3e", worst) + " < 1e-3");
    }

    // Time map on the exact shrinking circle: the only error left is quadrature.
    {
        Trajectory exact;
        exact.kind = RunKind::Unnormalized;
        const DiscreteCurve unit = canonical_scale(make_circle(1.0, 64));
        const std::size_t samples = 18000;
        for (std::size_t k = 0; k <= samples; ++k) {
            const double tau = 0.45 * static_cast<double>(k) / static_cast<double>(samples);
            exact.snapshots.push_back(Snapshot::make(scaled(unit, std::sqrt(1.0 - 2.0 * tau)), tau, k));
        }
        const NormalizedRun nr = normalize_trajectory(exact);
        double worst = 0.0;
        for (std::size_t k = 0; k < nr.clock.t.size(); ++k) {
            worst = std::max(worst, std::abs(nr.clock.t[k] + 0.5 * std::log(1.0 - 2.0 * nr.clock.tau[k])));
        }
        v.require(worst < 1e-6, "time map on exact lengths: |t + log(1 - 2 tau)/2| = " + fmt("%.3e", worst) + " < 1e-6");
    }

    // Round trip through a simulated run.
    {
        FlowConfig cfg;
        cfg.vertex_count = 1024;
        cfg.kind = RunKind::Unnormalized;
        cfg.scheme = Scheme::Explicit;
        cfg.dt = 1.0;  // the explicit stability limit sets the step
        cfg.end_time = 0.45;
        cfg.snapshot_interval = 100;
        cfg.embed_check_interval = 1000;
        cfg.resample_interval = 1'000'000;
        const Trajectory u = run(cfg, make_circle(1.0, 1024));
        v.require(u.termination == Termination::ReachedEnd, "explicit N=1024 run reached tau = 0.45");
        const NormalizedRun there = normalize_trajectory(u);
        double map_err = 0.0;
        for (std::size_t k = 0; k < there.clock.t.size(); ++k) {
            map_err = std::max(map_err, std::abs(there.clock.t[k] + 0.5 * std::log(1.0 - 2.0 * there.clock.tau[k])));
        }
        v.info("time map on the simulated run differs from the oracle by " + fmt("%.3e", map_err) +
               " (flow discretization)");
        const NormalizedRun back = recover_unnormalized(there.trajectory, u.front().frame.length);
        double pos = 0.0, tau = 0.0;
        for (std::size_t k = 0; k < u.snapshots.size(); ++k) {
            const DiscreteCurve& a = u.snapshots[k].curve;
            const DiscreteCurve& b = back.trajectory.snapshots[k].curve;
            double m = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                m = std::max(m, norm(a[i] - b[i]));
                scale = std::max(scale, norm(a[i]));
            }
            pos = std::max(pos, m / scale);
            tau = std::max(tau, std::abs(u.snapshots[k].time - back.clock.tau[k]));
        }
        v.require(pos < 1e-5, "round trip: max relative vertex error " + fmt("%.3e", pos) + " < 1e-5");
        v.require(tau < 1e-5, "round trip: max |tau - tau'| " + fmt("%.3e", tau) + " < 1e-5");
    }
    const double secs = seconds_since(t0);
    v.require(secs < 30.0, "runtime " + fmt("%.2f", secs) + " s < 30 s");
    return v;
}

Verdict criterion_distance() {
    Verdict v;
    for (const char* name : {"ellipse", "dumbbell"}) {
        const FlagshipResult& r = flagship_cached(name, 512);
        v.require(r.reached_end, std::string(name) + " reached t = 6");
        v.require(r.distance, std::string(name) + ": min Z = " + fmt("%.3e", r.min_z) + " >= -" + fmt("%.3e", r.z_tolerance));
        v.require(r.seconds < 180.0, std::string(name) + " runtime " + fmt("%.1f", r.seconds) + " s < 3 min");
    }
    return v;
}

Verdict criterion_abar() {
    Verdict v;
    for (const char* name : {"ellipse", "dumbbell"}) {
        const FlagshipResult& r = flagship_cached(name, 512);
        v.require(r.abar, std::string(name) + ": worst margin of log abar(0) - t + 0.05 - log abar(t) = " +
                              fmt("%.3e", r.abar_margin));
    }
    return v;
}

Verdict criterion_curvature() {
    Verdict v;
    for (const char* name : {"ellipse", "dumbbell"}) {
        const FlagshipResult& r = flagship_cached(name, 512);
        v.require(r.curvature, std::string(name) + ": worst margin of 1.02 (1 + 2 e^{-2(t - tbar)}) - k_max^2 = " +
                                   fmt("%.3e", r.curvature_margin));
    }
    return v;
}

Verdict criterion_convergence() {
    Verdict v;
    for (const char* name : {"ellipse", "dumbbell"}) {
        const FlagshipResult& r = flagship_cached(name, 512);
        v.require(r.l2, std::string(name) + ": worst margin of 1.05 * 2 e^{-2(t - tbar)} - int (k-1)^2 = " +
                            fmt("%.3e", r.l2_margin));
    }
    const FlagshipResult& e = flagship_cached("ellipse", 512);
    v.require(e.last.time == 6.0 && e.last.fit_deviation < 5e-3,
              "ellipse at t = 6: fitted-circle deviation " + fmt("%.3e", e.last.fit_deviation) + " < 5e-3");
    v.require(e.last.sup_deviation < 1e-2, "ellipse at t = 6: max |k - 1| = " + fmt("%.3e", e.last.sup_deviation) + " < 1e-2");
    return v;
}

Verdict criterion_convex_then_round() {
    Verdict v;
    const FlagshipResult& r = flagship_cached("dumbbell", 512);
    v.require(r.convex_at.has_value() && *r.convex_at < 6.0,
              "dumbbell convex at t = " + (r.convex_at ? fmt("%.3f", *r.convex_at) : std::string("never")) + " < 6");
    v.require(r.last.fit_deviation < 1e-2, "dumbbell at t = 6: fitted-circle deviation " + fmt("%.3e", r.last.fit_deviation) + " < 1e-2");
    v.info("dumbbell at t = 6: radius " + fmt("%.6f", r.last.radius) + ", max | |F - c| - 1 | = " + fmt("%.3e", r.last.unit_deviation));
    return v;
}

Verdict criterion_diagonal_limit() {
    Verdict v;
    const AnalyticEllipse ellipse{2.0, 1.0};
    const TaylorReport tr = check_short_chord_expansion(ellipse, 0.0);
    // Independent check of the diagonal value: k = 2 at (2, 0), so a = sqrt(3/2).
    v.require(std::abs(tr.a_diag - std::sqrt(1.5)) < 1e-14, "a_diagonal(2) = sqrt(3/2)");
    v.require(std::abs(tr.a_limit - tr.a_diag) < 1e-2,
              "|a_solve - a_diagonal| at eps = 1e-3: " + fmt("%.3e", std::abs(tr.a_limit - tr.a_diag)) + " < 1e-2");
    v.require(tr.observed_order >= 1.0, "(l - d)/l^3 -> k^2/24 with observed order " + fmt("%.3f", tr.observed_order) + " >= 1");
    return v;
}

Verdict criterion_mesh() {
    Verdict v;
    for (std::size_t n : {128u, 256u, 512u}) {
        for (const char* name : {"ellipse", "dumbbell"}) {
            const FlagshipResult& r = flagship_cached(name, n);
            const bool ok = r.reached_end && r.distance && r.abar && r.curvature && r.l2;
            std::ostringstream s;
            s << name << " N=" << n << ": distance " << (r.distance ? "ok" : "fail") << ", abar " << (r.abar ? "ok" : "fail")
              << ", curvature " << (r.curvature ? "ok" : "fail") << ", l2 " << (r.l2 ? "ok" : "fail") << " (Z tol "
              << fmt("%.3e", r.z_tolerance) << ")";
            v.require(ok, s.str());
        }
    }
    v.require(std::abs(geometric_tolerance(128) / geometric_tolerance(512) - 16.0) < 1e-12, "Z tolerance scales as N^-2");
    for (const char* name : {"ellipse", "dumbbell"}) {
        auto abar0 = [&](std::size_t n) {
            const DiscreteCurve c = std::string(name) == "ellipse" ? make_ellipse(2.0, 1.0, n) : make_dumbbell(0.2, n);
            return profile(build_frame(canonical_scale(c))).a_bar;
        };
        const double a256 = abar0(256), a1024 = abar0(1024);
        v.require(std::abs(a256 - a1024) < 1e-2, std::string(name) + ": abar(0) N=256 " + fmt("%.6f", a256) + " vs N=1024 " +
                                                     fmt("%.6f", a1024) + " within 1e-2");
    }
    return v;
}

Verdict criterion_determinism(const fs::path& out_root) {
    Verdict v;
    std::vector<std::string> series;
    for (int k = 0; k < 2; ++k) {
        RunSpec spec;
        spec.generator = "ellipse";
        spec.params = {{"a", 2.0}, {"b", 1.0}};
        spec.flow.vertex_count = 512;
        spec.flow.end_time = 6.0;
        spec.output_dir = (out_root / ("flagship_" + std::to_string(k))).string();
        std::ostringstream o, e;
        const RunOutcome r = cmd_run(spec, o, e);
        v.require(r.exit_code == 0, "flagship run " + std::to_string(k + 1) + " exit code " + std::to_string(r.exit_code));
        std::ifstream in(fs::path(spec.output_dir) / "series.csv", std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        series.push_back(buf.str());
    }
    v.require(!series[0].empty() && series[0] == series[1],
              "series.csv bit-identical (" + std::to_string(series[0].size()) + " bytes)");
    return v;
}

} // namespace

int main(int argc, char** argv) {
    fs::path out_root = "acceptance_runs";
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--out") && i + 1 < argc) {
            out_root = argv[++i];
        } else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
        } else {
            std::cerr << "usage: acceptance [--out DIR] [--only K[,K...]]\n";
            return 2;
        }
    }
    fs::create_directories(out_root);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"identity suite", criterion_identities},
        {"circle fixed point", criterion_circle_fixed_point},
        {"shrinking circle oracle", criterion_shrinking_circle},
        {"distance comparison", criterion_distance},
        {"exponential abar decay", criterion_abar},
        {"curvature bound", criterion_curvature},
        {"L2 convergence", criterion_convergence},
        {"dumbbell becomes convex and round", criterion_convex_then_round},
        {"diagonal limit", criterion_diagonal_limit},
        {"mesh refinement", criterion_mesh},
        {"determinism", [&] { return criterion_determinism(out_root); }},
    };

    int failures = 0;
    const auto start = Clock::now();
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k + 1);
        if (!only.empty() && !only.contains(id)) continue;
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        for (const std::string& n : v.notes) std::printf("    %s\n", n.c_str());
        std::printf("%s  %2d  %-36s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(), seconds_since(t0));
        std::fflush(stdout);
        if (!v.pass) ++failures;
    }
    std::printf("%d criteria failed, total %.1f s\n", failures, seconds_since(start));
    return failures == 0 ? 0 : 1;
}
