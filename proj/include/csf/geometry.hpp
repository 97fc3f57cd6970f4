#pragma once

// Discrete closed plane curves and the pointwise / pairwise quantities
// derived from them: edge lengths, arclength, tangents, outward normals,
// turning-angle curvature, chord and arc between vertex pairs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "csf/error.hpp"
#include "csf/vec2.hpp"

namespace csf {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr std::size_t min_vertex_count = 8;

/// Shoelace signed area; positive for counterclockwise polygons.
inline double signed_area(std::span<const Vec2> pts) {
    const std::size_t n = pts.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += cross(pts[i], pts[(i + 1) % n]);
    }
    return 0.5 * acc;
}

inline double polygon_length(std::span<const Vec2> pts) {
    const std::size_t n = pts.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += norm(pts[(i + 1) % n] - pts[i]);
    }
    return acc;
}

/// Closed polygon with at least eight distinct consecutive vertices, stored
/// counterclockwise. Clockwise input is reversed (vertex 0 is kept first).
/// Embeddedness is not enforced here; see is_embedded / require_embedded.
class DiscreteCurve {
public:
    DiscreteCurve() = default;

    explicit DiscreteCurve(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
        if (vertices_.size() < min_vertex_count) {
            throw Error(ErrorKind::DegenerateCurve,
                        "curve needs at least 8 vertices",
                        "n=" + std::to_string(vertices_.size()));
        }
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 p = vertices_[i];
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
                throw Error(ErrorKind::NumericalBlowup, "non-finite vertex coordinate",
                            "vertex=" + std::to_string(i));
            }
            if (p == vertices_[(i + 1) % n]) {
                throw Error(ErrorKind::DegenerateCurve, "duplicated consecutive vertex",
                            "vertex=" + std::to_string(i));
            }
        }
        if (signed_area(vertices_) < 0.0) {
            std::reverse(vertices_.begin() + 1, vertices_.end());
        }
    }

    std::size_t size() const noexcept { return vertices_.size(); }
    std::span<const Vec2> vertices() const noexcept { return vertices_; }
    Vec2 operator[](std::size_t i) const { return vertices_[i]; }

    double area() const { return signed_area(vertices_); }
    double length() const { return polygon_length(vertices_); }

    friend bool operator==(const DiscreteCurve&, const DiscreteCurve&) = default;

private:
    std::vector<Vec2> vertices_;
};

/// Derived geometry of a DiscreteCurve. Edge i joins vertex i to i+1.
///
/// Curvature at vertex i is the signed exterior turning angle divided by the
/// dual length (mean of the two adjacent edges), so sum(k * dual) equals the
/// total turning exactly. The tangent bisects the adjacent edge directions and
/// the normal is the tangent rotated by -pi/2 (outward for a CCW curve).
struct CurveFrame {
    std::vector<Vec2> positions;
    std::vector<double> edge_lengths;
    std::vector<double> arclength;    // s[i] = length from vertex 0 to vertex i
    std::vector<double> dual_lengths; // (|e_{i-1}| + |e_i|) / 2
    std::vector<double> turning;      // exterior angle at vertex i, in (-pi, pi)
    std::vector<Vec2> tangents;
    std::vector<Vec2> normals;
    std::vector<double> curvature;
    double length = 0.0;
    double mean_sq_curvature = 0.0;   // (1/L) * integral of k^2 ds

    std::size_t size() const noexcept { return positions.size(); }

    double total_turning() const {
        double acc = 0.0;
        for (double a : turning) acc += a;
        return acc;
    }
    double max_curvature() const { return *std::max_element(curvature.begin(), curvature.end()); }
    double min_curvature() const { return *std::min_element(curvature.begin(), curvature.end()); }
    double mean_edge() const { return length / static_cast<double>(size()); }
    double min_edge() const { return *std::min_element(edge_lengths.begin(), edge_lengths.end()); }
};

inline CurveFrame build_frame(const DiscreteCurve& curve) {
    const std::size_t n = curve.size();
    CurveFrame fr;
    fr.positions.assign(curve.vertices().begin(), curve.vertices().end());
    fr.edge_lengths.resize(n);
    fr.arclength.resize(n);
    fr.dual_lengths.resize(n);
    fr.turning.resize(n);
    fr.tangents.resize(n);
    fr.normals.resize(n);
    fr.curvature.resize(n);

    std::vector<Vec2> dirs(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = fr.positions[(i + 1) % n] - fr.positions[i];
        fr.edge_lengths[i] = norm(e);
        fr.arclength[i] = total;
        total += fr.edge_lengths[i];
        dirs[i] = e;
    }
    fr.length = total;

    const double floor = 1e-12 * total / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(fr.edge_lengths[i] > floor)) {
            throw Error(ErrorKind::DegenerateCurve, "edge shorter than 1e-12 of the mean edge",
                        "edge=" + std::to_string(i));
        }
        dirs[i] = dirs[i] / fr.edge_lengths[i];
    }

    double k2_integral = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t prev = (i + n - 1) % n;
        const Vec2 u0 = dirs[prev];
        const Vec2 u1 = dirs[i];
        fr.turning[i] = std::atan2(cross(u0, u1), dot(u0, u1));
        fr.dual_lengths[i] = 0.5 * (fr.edge_lengths[prev] + fr.edge_lengths[i]);
        fr.curvature[i] = fr.turning[i] / fr.dual_lengths[i];
        fr.tangents[i] = normalized(u0 + u1);
        fr.normals[i] = rotate_cw(fr.tangents[i]);
        k2_integral += fr.curvature[i] * fr.curvature[i] * fr.dual_lengths[i];
    }
    fr.mean_sq_curvature = k2_integral / total;
    return fr;
}

namespace detail {

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

/// Distance between segments ab and cd; zero when they properly cross.
inline double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double o1 = cross(b - a, c - a);
    const double o2 = cross(b - a, d - a);
    const double o3 = cross(d - c, a - c);
    const double o4 = cross(d - c, b - c);
    if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) &&
        ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) {
        return 0.0;
    }
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

} // namespace detail

/// Brute-force test over all pairs of non-adjacent edges. Two edges closer
/// than 1e-12 of the mean edge length count as intersecting.
inline bool is_embedded(std::span<const Vec2> pts) {
    const std::size_t n = pts.size();
    if (n < 3) return false;
    const double tol = 1e-12 * polygon_length(pts) / static_cast<double>(n);

    struct Box { double x0, x1, y0, y1; };
    std::vector<Box> boxes(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = pts[i];
        const Vec2 b = pts[(i + 1) % n];
        boxes[i] = {std::min(a.x, b.x) - tol, std::max(a.x, b.x) + tol,
                    std::min(a.y, b.y) - tol, std::max(a.y, b.y) + tol};
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue; // adjacent through the wrap
            const Box& bi = boxes[i];
            const Box& bj = boxes[j];
            if (bi.x1 < bj.x0 || bj.x1 < bi.x0 || bi.y1 < bj.y0 || bj.y1 < bi.y0) continue;
            if (detail::segment_distance(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) <= tol) {
                return false;
            }
        }
    }
    return true;
}

inline bool is_embedded(const DiscreteCurve& curve) { return is_embedded(curve.vertices()); }

inline void require_embedded(const DiscreteCurve& curve) {
    if (!is_embedded(curve)) {
        throw Error(ErrorKind::NotEmbedded, "curve has a self-intersection");
    }
}

/// Chord and shorter arc between two vertices of a frame.
struct ChordArc {
    std::size_t i = 0;
    std::size_t j = 0;
    double chord = 0.0;    // |F_j - F_i|
    double arc = 0.0;      // shorter arc, in [0, L/2]
    Vec2 direction;        // (F_j - F_i) / chord
    double opening = 0.0;  // angle between T_i and T_j, in [0, pi]
    double angle_i = 0.0;  // angle between T_i and the chord direction
    double angle_j = 0.0;  // angle between T_j and the chord direction
};

namespace detail {
inline double unit_angle(Vec2 a, Vec2 b) { return std::acos(std::clamp(dot(a, b), -1.0, 1.0)); }
} // namespace detail

inline double shorter_arc(const CurveFrame& fr, std::size_t i, std::size_t j) {
    const double along = std::abs(fr.arclength[j] - fr.arclength[i]);
    return std::min(along, fr.length - along);
}

inline ChordArc chord_arc(const CurveFrame& fr, std::size_t i, std::size_t j) {
    if (i == j || i >= fr.size() || j >= fr.size()) {
        throw Error(ErrorKind::InvalidPair, "chord_arc needs two distinct valid vertex indices",
                    "i=" + std::to_string(i) + " j=" + std::to_string(j));
    }
    ChordArc out;
    out.i = i;
    out.j = j;
    const Vec2 diff = fr.positions[j] - fr.positions[i];
    out.chord = norm(diff);
    out.arc = shorter_arc(fr, i, j);
    out.direction = diff / out.chord;
    out.opening = detail::unit_angle(fr.tangents[i], fr.tangents[j]);
    out.angle_i = detail::unit_angle(fr.tangents[i], out.direction);
    out.angle_j = detail::unit_angle(fr.tangents[j], out.direction);
    return out;
}

/// Equal-arclength resampling by linear interpolation along the polygon,
/// starting at vertex 0.
inline DiscreteCurve resample_uniform(const DiscreteCurve& curve, std::size_t count) {
    if (count < min_vertex_count) {
        throw Error(ErrorKind::ConfigError, "resample count must be at least 8",
                    "n=" + std::to_string(count));
    }
    const auto pts = curve.vertices();
    const std::size_t n = pts.size();
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        cum[i + 1] = cum[i] + norm(pts[(i + 1) % n] - pts[i]);
    }
    const double total = cum[n];
    const double spacing = total / static_cast<double>(count);

    std::vector<Vec2> out(count);
    out[0] = pts[0];
    std::size_t seg = 0;
    for (std::size_t k = 1; k < count; ++k) {
        const double target = spacing * static_cast<double>(k);
        while (seg + 1 < n && cum[seg + 1] < target) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double t = len > 0.0 ? std::clamp((target - cum[seg]) / len, 0.0, 1.0) : 0.0;
        out[k] = pts[seg] + t * (pts[(seg + 1) % n] - pts[seg]);
    }

    if (!is_embedded(out)) {
        throw Error(ErrorKind::ResampleFailure, "resampled polygon self-intersects",
                    "n=" + std::to_string(count));
    }
    try {
        return DiscreteCurve(std::move(out));
    } catch (const Error& e) {
        throw Error(ErrorKind::ResampleFailure, e.what(), e.context());
    }
}

/// Dilation about the origin to total length 2*pi.
inline DiscreteCurve canonical_scale(const DiscreteCurve& curve) {
    const double factor = two_pi / curve.length();
    std::vector<Vec2> out(curve.vertices().begin(), curve.vertices().end());
    for (Vec2& p : out) p *= factor;
    return DiscreteCurve(std::move(out));
}

inline DiscreteCurve scaled(const DiscreteCurve& curve, double factor) {
    std::vector<Vec2> out(curve.vertices().begin(), curve.vertices().end());
    for (Vec2& p : out) p *= factor;
    return DiscreteCurve(std::move(out));
}

/// Vertex centroid (mean of vertex positions).
inline Vec2 vertex_centroid(std::span<const Vec2> pts) {
    Vec2 c;
    for (Vec2 p : pts) c += p;
    return c / static_cast<double>(pts.size());
}

} // namespace csf
