#pragma once

// Smooth closed test curves with closed-form position, speed and curvature,
// plus equal-arclength sampling of any smooth parametric closed curve.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "csf/geometry.hpp"
#include "csf/quadrature.hpp"

namespace csf {

/// Axis-aligned ellipse (a cos u, b sin u); a == b gives a circle.
struct AnalyticEllipse {
    double a = 1.0;
    double b = 1.0;

    Vec2 position(double u) const { return {a * std::cos(u), b * std::sin(u)}; }

    double speed(double u) const {
        const double s = std::sin(u);
        const double c = std::cos(u);
        return std::sqrt(a * a * s * s + b * b * c * c);
    }

    double curvature(double u) const {
        const double v = speed(u);
        return a * b / (v * v * v);
    }

    /// F(u2) - F(u1) without cancellation for nearby parameters.
    Vec2 chord_vector(double u1, double u2) const {
        const double half = 0.5 * (u2 - u1);
        const double mid = 0.5 * (u2 + u1);
        const double sh = std::sin(half);
        return {-2.0 * a * std::sin(mid) * sh, 2.0 * b * std::cos(mid) * sh};
    }

    double chord(double u1, double u2) const { return norm(chord_vector(u1, u2)); }

    /// Arclength from u1 to u2 (u2 >= u1).
    double arc(double u1, double u2) const {
        const std::size_t panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((u2 - u1) * 8.0)));
        return gauss_legendre_20().integrate([this](double u) { return speed(u); }, u1, u2, panels);
    }

    double perimeter() const { return arc(0.0, two_pi); }

    /// Parameter u with arc(u0, u) = s, by Newton on the arclength integral.
    double advance(double u0, double s) const {
        double u = u0 + s / speed(u0);
        for (int iter = 0; iter < 60; ++iter) {
            const double r = arc(u0, u) - s;
            const double du = r / speed(u);
            u -= du;
            if (std::abs(du) < 1e-15 * (1.0 + std::abs(u))) break;
        }
        return u;
    }
};

/// Samples `count` points at equal arclength along a smooth closed curve
/// parametrized over [0, 2pi), starting at parameter 0. The arclength table
/// is built with composite Gauss-Legendre, then inverted by Newton.
inline std::vector<Vec2> sample_equal_arclength(const std::function<Vec2(double)>& position,
                                                const std::function<double(double)>& speed,
                                                std::size_t count, std::size_t panels = 2048) {
    const auto& gl = gauss_legendre_20();
    const double width = two_pi / static_cast<double>(panels);
    std::vector<double> cum(panels + 1, 0.0);
    for (std::size_t p = 0; p < panels; ++p) {
        cum[p + 1] = cum[p] + gl.integrate(speed, width * static_cast<double>(p), width * static_cast<double>(p + 1));
    }
    const double total = cum[panels];

    std::vector<Vec2> out(count);
    std::size_t panel = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(count);
        while (panel + 1 < panels && cum[panel + 1] <= target) ++panel;
        const double lo = width * static_cast<double>(panel);
        double u = lo + (target - cum[panel]) / speed(lo);
        for (int iter = 0; iter < 60; ++iter) {
            const double r = cum[panel] + gl.integrate(speed, lo, u) - target;
            const double du = r / speed(u);
            u -= du;
            if (std::abs(du) < 1e-15) break;
        }
        out[k] = position(u);
    }
    return out;
}

} // namespace csf
