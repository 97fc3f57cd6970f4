#pragma once

// Curve files (JSON or headerless x,y CSV), run-directory persistence and
// JSON encodings of reports. Floats are written with 17 significant digits.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "csf/diagnostics.hpp"
#include "csf/dynamics.hpp"
#include "csf/error.hpp"
#include "csf/geometry.hpp"
#include "csf/identities.hpp"

namespace csf {

using json = nlohmann::json;

inline constexpr const char* code_version = "0.1.0";

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// FNV-1a over the IEEE-754 bit patterns of the vertex coordinates.
inline std::string curve_hash(const DiscreteCurve& curve) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffU;
            h *= 1099511628211ULL;
        }
    };
    for (Vec2 p : curve.vertices()) {
        mix(p.x);
        mix(p.y);
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct NamedCurve {
    DiscreteCurve curve;
    std::string name;
};

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open file", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write file", path.string());
    out << text;
    if (!out) throw Error(ErrorKind::IoError, "write failed", path.string());
}

inline std::vector<Vec2> parse_curve_csv(const std::string& text, const std::string& source = {}) {
    std::vector<Vec2> pts;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw Error(ErrorKind::ParseError, "CSV rows must have exactly two columns x,y",
                        source + ":" + std::to_string(lineno));
        }
        try {
            std::size_t used = 0;
            const std::string xs = line.substr(0, comma);
            const std::string ys = line.substr(comma + 1);
            const double x = std::stod(xs, &used);
            if (xs.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(xs);
            const double y = std::stod(ys, &used);
            if (ys.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(ys);
            pts.push_back({x, y});
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::ParseError, "non-numeric CSV field", source + ":" + std::to_string(lineno));
        }
    }
    return pts;
}

inline NamedCurve parse_curve_json(const std::string& text, const std::string& source = {}) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what(), source);
    }
    if (!doc.is_object() || !doc.contains("vertices") || !doc["vertices"].is_array()) {
        throw Error(ErrorKind::ParseError, "curve JSON needs a \"vertices\" array", source);
    }
    std::vector<Vec2> pts;
    for (const json& v : doc["vertices"]) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw Error(ErrorKind::ParseError, "each vertex must be [x, y]", source);
        }
        pts.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    NamedCurve out{DiscreteCurve(std::move(pts)), {}};
    if (doc.contains("name") && doc["name"].is_string()) out.name = doc["name"].get<std::string>();
    return out;
}

/// Loads a curve; the format follows the extension (.csv, otherwise JSON).
inline NamedCurve load_curve(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    if (path.extension() == ".csv") {
        return {DiscreteCurve(parse_curve_csv(text, path.string())), path.stem().string()};
    }
    return parse_curve_json(text, path.string());
}

inline std::string curve_to_json(const DiscreteCurve& curve, const std::string& name = {}) {
    std::string out = "{";
    if (!name.empty()) out += "\"name\": " + json(name).dump() + ", ";
    out += "\"vertices\": [";
    bool first = true;
    for (Vec2 p : curve.vertices()) {
        if (!first) out += ", ";
        first = false;
        out += "[" + format_double(p.x) + ", " + format_double(p.y) + "]";
    }
    out += "]}\n";
    return out;
}

inline std::string curve_to_csv(const DiscreteCurve& curve) {
    std::string out;
    for (Vec2 p : curve.vertices()) out += format_double(p.x) + "," + format_double(p.y) + "\n";
    return out;
}

inline void save_curve(const std::filesystem::path& path, const DiscreteCurve& curve, const std::string& name = {}) {
    write_text(path, path.extension() == ".csv" ? curve_to_csv(curve) : curve_to_json(curve, name));
}

// ---------------------------------------------------------------------------
// FlowConfig <-> JSON

inline json to_json(const FlowConfig& c) {
    return json{{"vertex_count", c.vertex_count},
                {"kind", std::string(to_string(c.kind))},
                {"scheme", std::string(to_string(c.scheme))},
                {"policy", std::string(to_string(c.policy))},
                {"dt", c.dt},
                {"safety", c.safety},
                {"resample_interval", c.resample_interval},
                {"end_time", c.end_time},
                {"snapshot_interval", c.snapshot_interval},
                {"embed_check_interval", c.embed_check_interval},
                {"max_steps", c.max_steps},
                {"blowup_resolution", c.blowup_resolution}};
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "explicit") return Scheme::Explicit;
    if (s == "semi-implicit") return Scheme::SemiImplicit;
    throw Error(ErrorKind::ConfigError, "unknown scheme", s);
}

inline RunKind parse_kind(const std::string& s) {
    if (s == "normalized") return RunKind::Normalized;
    if (s == "unnormalized") return RunKind::Unnormalized;
    throw Error(ErrorKind::ConfigError, "unknown run kind", s);
}

inline StepPolicy parse_policy(const std::string& s) {
    if (s == "fixed") return StepPolicy::Fixed;
    if (s == "adaptive") return StepPolicy::Adaptive;
    throw Error(ErrorKind::ConfigError, "unknown step policy", s);
}

inline FlowConfig flow_config_from_json(const json& j) {
    try {
        FlowConfig c;
        c.vertex_count = j.at("vertex_count").get<std::size_t>();
        c.kind = parse_kind(j.at("kind").get<std::string>());
        c.scheme = parse_scheme(j.at("scheme").get<std::string>());
        c.policy = parse_policy(j.at("policy").get<std::string>());
        c.dt = j.at("dt").get<double>();
        c.safety = j.at("safety").get<double>();
        c.resample_interval = j.at("resample_interval").get<std::size_t>();
        c.end_time = j.at("end_time").get<double>();
        c.snapshot_interval = j.at("snapshot_interval").get<std::size_t>();
        c.embed_check_interval = j.at("embed_check_interval").get<std::size_t>();
        c.max_steps = j.at("max_steps").get<std::size_t>();
        c.blowup_resolution = j.at("blowup_resolution").get<double>();
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what(), "flow config");
    }
}

// ---------------------------------------------------------------------------
// series.csv

inline constexpr const char* series_header = "step,time,L,k_max,k_min,avg_k2,area,a_bar,t_bar,min_Z,l2_dev";

/// Per-snapshot diagnostic columns; unset entries are written as empty fields.
struct DiagnosticColumns {
    std::vector<std::optional<double>> a_bar;
    std::vector<std::optional<double>> min_z;
    std::vector<std::optional<double>> l2_dev;
};

inline std::string series_csv(const Trajectory& traj, const DiagnosticColumns* diag = nullptr) {
    std::string out = std::string(series_header) + "\n";
    auto opt = [](const std::vector<std::optional<double>>* col, std::size_t k) -> std::string {
        if (!col || k >= col->size() || !(*col)[k]) return "";
        return format_double(*(*col)[k]);
    };
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const Snapshot& s = traj.snapshots[k];
        out += std::to_string(s.step) + "," + format_double(s.time) + "," + format_double(s.frame.length) + "," +
               format_double(s.frame.max_curvature()) + "," + format_double(s.frame.min_curvature()) + "," +
               format_double(s.frame.mean_sq_curvature) + "," + format_double(s.curve.area()) + ",";
        const std::string abar = opt(diag ? &diag->a_bar : nullptr, k);
        out += abar + ",";
        if (diag && k < diag->a_bar.size() && diag->a_bar[k]) {
            const double a = *diag->a_bar[k];
            out += format_double(a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity());
        }
        out += "," + opt(diag ? &diag->min_z : nullptr, k) + "," + opt(diag ? &diag->l2_dev : nullptr, k) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Report encodings

inline json to_json(const BoundReport& r) {
    json series = json::array();
    for (const BoundSample& s : r.series) {
        if (s.skipped) {
            series.push_back({{"time", s.time}, {"skipped", true}});
        } else {
            series.push_back({{"time", s.time}, {"measured", s.measured}, {"bound", s.bound}, {"margin", s.margin}});
        }
    }
    return json{{"name", r.name},
                {"pass", r.passed},
                {"worst_margin", std::isfinite(r.worst_margin) ? json(r.worst_margin) : json(nullptr)},
                {"worst_time", r.worst_time},
                {"relative_tolerance", r.relative_tolerance},
                {"absolute_tolerance", r.absolute_tolerance},
                {"series", std::move(series)}};
}

inline json to_json(const IdentityReport& r) {
    json details = json::object();
    for (const auto& [k, v] : r.details) details[k] = std::isfinite(v) ? json(v) : json(format_double(v));
    return json{{"name", r.name},
                {"grid", r.grid},
                {"max_residual", r.max_residual},
                {"max_violation", r.max_violation},
                {"tolerance", r.tolerance},
                {"pass", r.passed},
                {"note", r.note},
                {"details", std::move(details)}};
}

inline json to_json(const DerivativeDecay& d) {
    json series = json::array();
    for (std::size_t k = 0; k < d.time.size(); ++k) series.push_back({{"time", d.time[k]}, {"sup_dk_ds", d.sup_dk_ds[k]}});
    return json{{"name", "derivative decay"},
                {"informational", true},
                {"fitted_rate", std::isfinite(d.fitted_rate) ? json(d.fitted_rate) : json(nullptr)},
                {"flagged", d.flagged},
                {"negligible", d.negligible},
                {"series", std::move(series)}};
}

} // namespace csf
