#pragma once

// Run orchestration behind the csflab command line: run specs, the run
// directory layout, and the run / verify-identities / profile / bench
// commands. Every command returns a process exit status.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csf/diagnostics.hpp"
#include "csf/dynamics.hpp"
#include "csf/generators.hpp"
#include "csf/identities.hpp"
#include "csf/io.hpp"

namespace csf {

inline const std::set<std::string>& known_checks() {
    static const std::set<std::string> names{"distance", "abar", "curvature", "l2", "decay"};
    return names;
}

struct RunSpec {
    std::string generator;          // empty when `input` is set
    GeneratorParams params;
    std::string input;
    FlowConfig flow;
    std::vector<std::string> checks{"all"};
    std::string output_dir;
    std::uint64_t seed = 1;
    bool write_snapshots = true;

    bool wants(const std::string& check) const {
        for (const std::string& c : checks) {
            if (c == "all" || c == check) return true;
        }
        return false;
    }

    void validate() const {
        if (generator.empty() == input.empty()) {
            throw Error(ErrorKind::ConfigError, "exactly one of generator or input must be given");
        }
        for (const std::string& c : checks) {
            if (c != "all" && c != "none" && !known_checks().contains(c)) throw Error(ErrorKind::ConfigError, "unknown check", c);
        }
        if (output_dir.empty()) throw Error(ErrorKind::ConfigError, "output directory not set");
        flow.validate();
    }

    friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

inline json to_json(const RunSpec& s) {
    return json{{"generator", s.generator},
                {"params", s.params},
                {"input", s.input},
                {"flow", to_json(s.flow)},
                {"checks", s.checks},
                {"output_dir", s.output_dir},
                {"seed", s.seed},
                {"write_snapshots", s.write_snapshots}};
}

inline RunSpec run_spec_from_json(const json& j) {
    try {
        RunSpec s;
        s.generator = j.at("generator").get<std::string>();
        s.params = j.at("params").get<GeneratorParams>();
        s.input = j.at("input").get<std::string>();
        s.flow = flow_config_from_json(j.at("flow"));
        s.checks = j.at("checks").get<std::vector<std::string>>();
        s.output_dir = j.at("output_dir").get<std::string>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.write_snapshots = j.at("write_snapshots").get<bool>();
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what(), "run spec");
    }
}

/// Reads the run spec echoed into a run directory's config.json.
inline RunSpec load_run_spec(const std::filesystem::path& config_json) {
    try {
        return run_spec_from_json(json::parse(read_text(config_json)).at("run_spec"));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what(), config_json.string());
    }
}

/// Output root from CSFLAB_OUTPUT_ROOT, else ./runs.
inline std::filesystem::path default_output_root() {
    if (const char* env = std::getenv("CSFLAB_OUTPUT_ROOT"); env && *env) return env;
    return "runs";
}

/// Single-line {kind, message, context} error record.
inline std::string error_json(const Error& e) {
    return json{{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}, {"context", e.context()}}.dump();
}

inline DiscreteCurve initial_curve(const RunSpec& spec) {
    if (!spec.input.empty()) return load_curve(spec.input).curve;
    GeneratorParams params = spec.params;
    if (spec.generator == "fourier" && !params.contains("seed")) params["seed"] = static_cast<double>(spec.seed);
    if (!params.contains("n")) params["n"] = static_cast<double>(spec.flow.vertex_count);
    return generate(spec.generator, params);
}

struct RunOutcome {
    int exit_code = 0;
    Termination termination = Termination::ReachedEnd;
    bool checks_passed = true;
    std::filesystem::path directory;
};

/// generate/load -> scale -> flow -> diagnostics -> run directory.
/// Exit 0 iff the flow reached its end time and every hard check passed;
/// 1 otherwise; 2 on any error (reported as one JSON line on `err`).
inline RunOutcome cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    RunOutcome outcome;
    try {
        spec.validate();
        DiscreteCurve curve = initial_curve(spec);
        require_embedded(curve);
        if (spec.flow.kind == RunKind::Normalized) curve = canonical_scale(curve);

        const std::filesystem::path dir = spec.output_dir;
        outcome.directory = dir;
        std::error_code ec;
        std::filesystem::create_directories(dir / "reports", ec);
        if (ec) throw Error(ErrorKind::IoError, "cannot create output directory", dir.string());

        json config{{"run_spec", to_json(spec)},
                    {"initial_curve_hash", curve_hash(curve)},
                    {"code_version", code_version}};
        write_text(dir / "config.json", config.dump(2) + "\n");

        const Trajectory traj = run(spec.flow, curve);
        const Trajectory diag_traj =
            traj.kind == RunKind::Normalized ? traj : normalize_trajectory(traj).trajectory;

        const std::size_t n_snap = traj.snapshots.size();
        DiagnosticColumns cols;
        json summary_checks = json::object();
        bool hard_ok = true;

        const ComparisonOffset offset = initial_offset(diag_traj);
        if (spec.wants("distance")) {
            const DistanceComparisonReport dc = check_distance_comparison(diag_traj);
            cols.min_z.resize(n_snap);
            for (std::size_t k = 0; k < n_snap; ++k) cols.min_z[k] = -dc.bound.series[k].measured;
            json rep = to_json(dc.bound);
            rep["t_bar"] = offset.round ? json(nullptr) : json(offset.t_bar);
            rep["min_z"] = dc.min_z;
            rep["min_z_time"] = dc.min_z_time;
            rep["min_z_pair"] = {dc.min_z_i, dc.min_z_j};
            write_text(dir / "reports" / "distance_comparison.json", rep.dump(2) + "\n");
            summary_checks["distance"] = dc.bound.passed;
            hard_ok = hard_ok && dc.bound.passed;
        }
        if (spec.wants("abar")) {
            const AbarSeries series = abar_series(diag_traj);
            cols.a_bar.assign(series.a_bar.begin(), series.a_bar.end());
            const BoundReport rep = check_abar_decay(diag_traj, series);
            write_text(dir / "reports" / "abar_decay.json", to_json(rep).dump(2) + "\n");
            summary_checks["abar"] = rep.passed;
            hard_ok = hard_ok && rep.passed;
        }
        if (spec.wants("curvature")) {
            const BoundReport rep = check_curvature_bound(diag_traj, offset);
            json j = to_json(rep);
            j["margin_nondecreasing_after_t1"] = margin_nondecreasing_after(rep);
            write_text(dir / "reports" / "curvature_bound.json", j.dump(2) + "\n");
            summary_checks["curvature"] = rep.passed;
            hard_ok = hard_ok && rep.passed;
        }
        if (spec.wants("l2")) {
            const ConvergenceMetrics cm = convergence_metrics(diag_traj, offset);
            cols.l2_dev.resize(n_snap);
            for (std::size_t k = 0; k < n_snap; ++k) cols.l2_dev[k] = cm.samples[k].l2_deviation;
            json j = to_json(cm.l2_bound);
            j["identity_max_residual"] = cm.max_identity_residual;
            j["identity_pass"] = cm.identity_passed;
            const ConvergenceSample& last = cm.samples.back();
            j["final"] = {{"time", last.time}, {"sup_deviation", last.sup_deviation},
                          {"fit_deviation", last.fit_deviation}, {"radius", last.radius},
                          {"center", {last.center.x, last.center.y}}};
            if (const auto ct = convexity_time(diag_traj)) j["convex_from"] = *ct;
            write_text(dir / "reports" / "l2_bound.json", j.dump(2) + "\n");
            summary_checks["l2"] = cm.l2_bound.passed && cm.identity_passed;
            hard_ok = hard_ok && cm.l2_bound.passed && cm.identity_passed;
        }
        if (spec.wants("decay")) {
            const DerivativeDecay dd = derivative_decay(diag_traj);
            write_text(dir / "reports" / "derivative_decay.json", to_json(dd).dump(2) + "\n");
        }

        write_text(dir / "series.csv", series_csv(traj, &cols));
        if (spec.write_snapshots) {
            std::filesystem::create_directories(dir / "snapshots", ec);
            for (const Snapshot& s : traj.snapshots) {
                char name[48];
                std::snprintf(name, sizeof name, "snapshot_%08zu.json", s.step);
                save_curve(dir / "snapshots" / name, s.curve);
            }
        }

        outcome.termination = traj.termination;
        outcome.checks_passed = hard_ok;
        outcome.exit_code = (traj.termination == Termination::ReachedEnd && hard_ok) ? 0 : 1;

        json summary{{"termination", std::string(to_string(traj.termination))},
                     {"message", traj.message},
                     {"steps", traj.steps},
                     {"snapshots", n_snap},
                     {"a_bar0", offset.round ? 0.0 : std::exp(offset.t_bar)},
                     {"t_bar", offset.round ? json(nullptr) : json(offset.t_bar)},
                     {"checks", summary_checks},
                     {"exit_code", outcome.exit_code}};
        write_text(dir / "reports" / "summary.json", summary.dump(2) + "\n");

        out << "run directory : " << dir.string() << "\n"
            << "termination   : " << to_string(traj.termination) << " after " << traj.steps << " steps\n"
            << "t_bar         : " << (offset.round ? std::string("round (a_bar = 0)") : format_double(offset.t_bar)) << "\n";
        for (auto it = summary_checks.begin(); it != summary_checks.end(); ++it) {
            out << "check " << std::left << std::setw(10) << it.key() << ": " << (it.value().get<bool>() ? "pass" : "FAIL") << "\n";
        }
    } catch (const Error& e) {
        err << error_json(e) << "\n";
        outcome.exit_code = 2;
        outcome.checks_passed = false;
    }
    return outcome;
}

/// Runs one spec per seed in parallel, each into <output_dir>/seed_<s>.
/// Returns the largest exit code.
inline int cmd_sweep(const RunSpec& base, const std::vector<std::uint64_t>& seeds, std::ostream& out, std::ostream& err) {
    std::vector<std::future<std::pair<int, std::string>>> jobs;
    for (std::uint64_t seed : seeds) {
        RunSpec spec = base;
        spec.seed = seed;
        spec.params.erase("seed");
        spec.output_dir = (std::filesystem::path(base.output_dir) / ("seed_" + std::to_string(seed))).string();
        jobs.push_back(std::async(std::launch::async, [spec] {
            std::ostringstream o, e;
            const RunOutcome r = cmd_run(spec, o, e);
            return std::make_pair(r.exit_code, o.str() + e.str());
        }));
    }
    int worst = 0;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        auto [code, text] = jobs[k].get();
        (code == 2 ? err : out) << "[seed " << seeds[k] << "]\n" << text;
        worst = std::max(worst, code);
    }
    return worst;
}

struct IdentityOptions {
    std::size_t grid_x = 400;
    std::size_t grid_t = 101;
    double perturb = 0.0;  // nonzero: check f + perturb * x instead of f
};

inline std::vector<IdentityReport> identity_reports(const IdentityOptions& opt) {
    IdentityGrid grid;
    grid.nx = opt.grid_x;
    grid.nt = opt.grid_t;
    std::vector<IdentityReport> reps;
    auto with_f = [&](const auto& f) {
        reps.push_back(check_Ltilde(grid, f));
        reps.push_back(check_derivatives_fd(grid, 20, 20240611, f));
        reps.push_back(check_L_dominates(grid, f));
        reps.push_back(check_f_shape(grid, f));
        reps.push_back(check_subadditivity(10000, 7, f));
    };
    if (opt.perturb != 0.0) {
        with_f(PerturbedComparison{opt.perturb});
    } else {
        with_f(ArctanComparison{});
    }
    reps.push_back(check_g_positive());
    reps.push_back(check_h_convexity());

    auto taylor = [&](const AnalyticEllipse& e, double u0, const std::string& label) {
        IdentityReport r = check_short_chord_expansion(e, u0).report;
        r.name += " (" + label + ")";
        reps.push_back(std::move(r));
    };
    taylor({1.0, 1.0}, 0.0, "unit circle");
    taylor({2.0, 1.0}, 0.0, "ellipse 2:1, k = 2");
    taylor({2.0, 1.0}, std::numbers::pi / 2, "ellipse 2:1, k = 1/4");
    return reps;
}

inline void print_identity_table(const std::vector<IdentityReport>& reps, std::ostream& out) {
    out << std::left << std::setw(62) << "identity" << std::setw(14) << "residual" << std::setw(12) << "tolerance"
        << "result\n";
    for (const IdentityReport& r : reps) {
        std::ostringstream res, tol;
        res << std::scientific << std::setprecision(3) << r.max_residual;
        tol << std::scientific << std::setprecision(1) << r.tolerance;
        out << std::left << std::setw(62) << r.name << std::setw(14) << res.str() << std::setw(12) << tol.str()
            << (r.passed ? "pass" : "FAIL") << "\n";
    }
}

/// Prints the identity table (or, with json_to_stdout, only the JSON array)
/// and optionally writes the JSON array to `json_path`. Exit 0 iff all pass.
inline int cmd_verify_identities(const IdentityOptions& opt, std::ostream& out, const std::string& json_path = {},
                                 bool json_to_stdout = false) {
    const std::vector<IdentityReport> reps = identity_reports(opt);
    json arr = json::array();
    bool ok = true;
    for (const IdentityReport& r : reps) {
        arr.push_back(to_json(r));
        ok = ok && r.passed;
    }
    if (json_to_stdout) {
        out << arr.dump(2) << "\n";
    } else {
        print_identity_table(reps, out);
        out << (ok ? "all identities hold\n" : "identity check FAILED\n");
    }
    if (!json_path.empty()) write_text(json_path, arr.dump(2) + "\n");
    return ok ? 0 : 1;
}

/// Static profile of a curve file (scaled to length 2pi): abar, tbar, the
/// extremal pair and the diagonal maximum; optionally the full pair table.
inline int cmd_profile(const std::string& input, const std::string& csv_path, std::ostream& out, std::ostream& err) {
    try {
        NamedCurve nc = load_curve(input);
        require_embedded(nc.curve);
        const DiscreteCurve scaled_curve = canonical_scale(nc.curve);
        const CurveFrame frame = build_frame(scaled_curve);
        const ProfileSummary p = profile(frame);
        out << "vertices      : " << frame.size() << "\n"
            << "a_bar         : " << format_double(p.a_bar) << "\n"
            << "t_bar         : " << (p.offset.round ? std::string("round (a_bar = 0)") : format_double(p.offset.t_bar)) << "\n"
            << "arg-max pair  : (" << p.arg_i << ", " << p.arg_j << ")" << (p.on_diagonal ? " diagonal" : "") << "\n"
            << "diagonal max  : " << format_double(p.diagonal_max) << "\n"
            << "off-diag max  : " << format_double(p.off_diagonal_max) << "\n";
        if (!csv_path.empty()) {
            const auto rows = pair_table(frame, ZQuery{0.0, p.offset});
            std::string text = "i,j,arc,chord,a,z\n";
            for (const ChordArcRecord& r : rows) {
                text += std::to_string(r.geometry.i) + "," + std::to_string(r.geometry.j) + "," +
                        format_double(r.geometry.arc) + "," + format_double(r.geometry.chord) + "," +
                        format_double(r.a) + "," + format_double(r.z) + "\n";
            }
            write_text(csv_path, text);
        }
        return 0;
    } catch (const Error& e) {
        err << error_json(e) << "\n";
        return 2;
    }
}

/// Steps per second of both schemes on the normalized ellipse 2:1.
inline int cmd_bench(std::size_t n, std::size_t steps, std::ostream& out) {
    const DiscreteCurve start = canonical_scale(make_ellipse(2.0, 1.0, n));
    for (Scheme scheme : {Scheme::SemiImplicit, Scheme::Explicit}) {
        Snapshot s = Snapshot::make(start, 0.0, 0);
        const double h = s.frame.min_edge();
        const double dt = scheme == Scheme::Explicit ? explicit_stability_factor * h * h : 1e-3;
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t k = 0; k < steps; ++k) s = step_normalized(s, dt, scheme, false);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out << std::left << std::setw(14) << to_string(scheme) << " N=" << n << "  " << std::fixed
            << std::setprecision(0) << static_cast<double>(steps) / secs << " steps/s  (dt = " << std::scientific
            << std::setprecision(2) << dt << ")\n";
        out << std::defaultfloat;
    }
    return 0;
}

} // namespace csf
