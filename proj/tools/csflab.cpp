// csflab: normalized curve shortening flow lab.
//
//   csflab run --generator ellipse --a 2 --b 1 --n 512 --t-end 6 --check all
//   csflab run --input curve.json --kind unnormalized --scheme explicit
//   csflab run --generator fourier --sweep 1,2,3,4,5
//   csflab verify-identities [--grid-x 1000 --grid-t 201] [--json out.json]
//   csflab profile curve.json [--csv pairs.csv]
//   csflab bench [--n 512 --steps 200]

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "csf/harness.hpp"

namespace {

std::string default_run_dir(const csf::RunSpec& spec) {
    std::string name = spec.generator.empty() ? std::filesystem::path(spec.input).stem().string() : spec.generator;
    if (spec.generator == "fourier") name += "_seed" + std::to_string(spec.seed);
    return (csf::default_output_root() / name).string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"normalized curve shortening flow lab"};
    app.require_subcommand(1);

    // run
    csf::RunSpec spec;
    std::string scheme = "semi-implicit", kind = "normalized", policy = "fixed";
    std::optional<double> r, a, b, neck;
    std::optional<std::size_t> modes;
    std::vector<std::uint64_t> sweep;
    bool no_snapshots = false;
    spec.checks.clear();

    CLI::App* run = app.add_subcommand("run", "evolve a curve and check the flow diagnostics");
    auto* source = run->add_option_group("source");
    source->add_option("--generator", spec.generator, "circle | ellipse | dumbbell | fourier");
    source->add_option("--input", spec.input, "curve file (.json or .csv)");
    source->require_option(1);
    run->add_option("--r", r, "circle radius");
    run->add_option("--a", a, "ellipse semi-axis along x");
    run->add_option("--b", b, "ellipse semi-axis along y");
    run->add_option("--neck", neck, "dumbbell waist width");
    run->add_option("--modes", modes, "fourier harmonics");
    run->add_option("--seed", spec.seed, "fourier seed")->capture_default_str();
    run->add_option("--n", spec.flow.vertex_count, "vertex count")->capture_default_str();
    run->add_option("--kind", kind, "normalized | unnormalized")->capture_default_str();
    run->add_option("--scheme", scheme, "semi-implicit | explicit")->capture_default_str();
    run->add_option("--policy", policy, "fixed | adaptive")->capture_default_str();
    run->add_option("--dt", spec.flow.dt, "time step (cap for adaptive)")->capture_default_str();
    run->add_option("--safety", spec.flow.safety, "adaptive factor c in dt = c / k_max^2")->capture_default_str();
    run->add_option("--t-end", spec.flow.end_time, "final time")->capture_default_str();
    run->add_option("--resample", spec.flow.resample_interval, "steps between resamplings (0 = never)")->capture_default_str();
    run->add_option("--snapshot", spec.flow.snapshot_interval, "steps between snapshots")->capture_default_str();
    run->add_option("--embed-check", spec.flow.embed_check_interval, "steps between embeddedness checks")->capture_default_str();
    run->add_option("--max-steps", spec.flow.max_steps, "step budget")->capture_default_str();
    run->add_option("--check", spec.checks, "all | none | distance abar curvature l2 decay");
    run->add_option("--out", spec.output_dir, "run directory (default $CSFLAB_OUTPUT_ROOT/<name>)");
    run->add_option("--sweep", sweep, "run these fourier seeds in parallel")->delimiter(',');
    run->add_flag("--no-snapshots", no_snapshots, "skip writing snapshot curve files");

    // verify-identities
    csf::IdentityOptions id_opt;
    std::string id_json;
    bool id_json_stdout = false;
    CLI::App* verify = app.add_subcommand("verify-identities", "check the comparison-function identities");
    verify->add_option("--grid-x", id_opt.grid_x, "points in x")->capture_default_str();
    verify->add_option("--grid-t", id_opt.grid_t, "points in t")->capture_default_str();
    verify->add_option("--perturb", id_opt.perturb, "check f + eps x instead of f (mutation hook)");
    verify->add_option("--json", id_json, "write the reports as a JSON array");
    verify->add_flag("--json-stdout", id_json_stdout, "print the JSON array instead of the table");

    // profile
    std::string profile_input, profile_csv;
    CLI::App* prof = app.add_subcommand("profile", "ratio profile of a static curve");
    prof->add_option("input", profile_input, "curve file")->required();
    prof->add_option("--csv", profile_csv, "write the (i, j, arc, chord, a, z) pair table");

    // bench
    std::size_t bench_n = 512, bench_steps = 200;
    CLI::App* bench = app.add_subcommand("bench", "steps per second for both schemes");
    bench->add_option("--n", bench_n)->capture_default_str();
    bench->add_option("--steps", bench_steps)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            spec.flow.kind = csf::parse_kind(kind);
            spec.flow.scheme = csf::parse_scheme(scheme);
            spec.flow.policy = csf::parse_policy(policy);
            if (spec.checks.empty()) spec.checks = {"all"};
            if (r) spec.params["r"] = *r;
            if (a) spec.params["a"] = *a;
            if (b) spec.params["b"] = *b;
            if (neck) spec.params["neck"] = *neck;
            if (modes) spec.params["modes"] = static_cast<double>(*modes);
            spec.write_snapshots = !no_snapshots;
            if (spec.output_dir.empty()) spec.output_dir = default_run_dir(spec);
            if (!sweep.empty()) return csf::cmd_sweep(spec, sweep, std::cout, std::cerr);
            return csf::cmd_run(spec, std::cout, std::cerr).exit_code;
        }
        if (verify->parsed()) return csf::cmd_verify_identities(id_opt, std::cout, id_json, id_json_stdout);
        if (prof->parsed()) return csf::cmd_profile(profile_input, profile_csv, std::cout, std::cerr);
        if (bench->parsed()) return csf::cmd_bench(bench_n, bench_steps, std::cout);
    } catch (const csf::Error& e) {
        std::cerr << csf::error_json(e) << "\n";
        return 2;
    }
    return 0;
}
