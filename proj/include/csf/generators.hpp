#pragma once

// Initial-curve factory: circle, ellipse, dumbbell and random Fourier curves.
// Every output is counterclockwise, equal-arclength sampled and embedded.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "csf/analytic.hpp"
#include "csf/error.hpp"
#include "csf/geometry.hpp"

namespace csf {

using GeneratorParams = std::map<std::string, double>;

inline DiscreteCurve make_circle(double radius, std::size_t n) {
    if (!(radius > 0.0)) throw Error(ErrorKind::ConfigError, "circle radius must be positive");
    std::vector<Vec2> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = two_pi * static_cast<double>(i) / static_cast<double>(n);
        pts[i] = {radius * std::cos(u), radius * std::sin(u)};
    }
    return DiscreteCurve(std::move(pts));
}

inline DiscreteCurve make_ellipse(double a, double b, std::size_t n) {
    if (!(a > 0.0 && b > 0.0)) throw Error(ErrorKind::ConfigError, "ellipse semi-axes must be positive");
    const AnalyticEllipse e{a, b};
    return DiscreteCurve(sample_equal_arclength([&](double u) { return e.position(u); },
                                                [&](double u) { return e.speed(u); }, n));
}

/// Cassini oval (x^2+y^2)^2 - 2(x^2-y^2) = b^4 - 1 with b^2 = 1 + (neck/2)^2,
/// so the waist across the y axis has width `neck`. In polar form
/// r^2 = cos 2u + sqrt(b^4 - sin^2 2u), which is star-shaped (hence embedded)
/// for every neck > 0.
inline DiscreteCurve make_dumbbell(double neck, std::size_t n) {
    if (!(neck > 0.0 && neck < 2.0)) throw Error(ErrorKind::ConfigError, "dumbbell neck must lie in (0, 2)");
    const double b2 = 1.0 + 0.25 * neck * neck;
    const double b4 = b2 * b2;
    auto radius2 = [=](double u) { return std::cos(2 * u) + std::sqrt(b4 - std::sin(2 * u) * std::sin(2 * u)); };
    auto position = [=](double u) {
        const double r = std::sqrt(radius2(u));
        return Vec2{r * std::cos(u), r * std::sin(u)};
    };
    auto speed = [=](double u) {
        const double r2 = radius2(u);
        const double s2 = std::sin(2 * u);
        const double c2 = std::cos(2 * u);
        const double dr2 = -2 * s2 - 2 * s2 * c2 / std::sqrt(b4 - s2 * s2);  // d(r^2)/du
        const double dr = dr2 / (2 * std::sqrt(r2));
        return std::sqrt(r2 + dr * dr);
    };
    DiscreteCurve c(sample_equal_arclength(position, speed, n, 4096));
    if (!is_embedded(c)) throw Error(ErrorKind::GenerationFailure, "dumbbell sampling self-intersects");
    return c;
}

/// Portable uniform double in [0, 1) from the top 53 bits of mt19937_64.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline constexpr double fourier_amplitude = 0.15;

/// Unit circle plus harmonics 2..modes with uniform random coefficients in
/// [-A/m^2, A/m^2], A = 0.15. Rejection-sampled until embedded (at most
/// `max_attempts` draws from the same stream).
inline DiscreteCurve make_fourier(std::uint64_t seed, std::size_t modes, std::size_t n,
                                  std::size_t max_attempts = 100) {
    if (modes < 2) throw Error(ErrorKind::ConfigError, "fourier needs modes >= 2");
    std::mt19937_64 rng(seed);
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<double> ax(modes + 1), bx(modes + 1), ay(modes + 1), by(modes + 1);
        for (std::size_t m = 2; m <= modes; ++m) {
            const double scale = fourier_amplitude / static_cast<double>(m * m);
            ax[m] = scale * (2 * uniform01(rng) - 1);
            bx[m] = scale * (2 * uniform01(rng) - 1);
            ay[m] = scale * (2 * uniform01(rng) - 1);
            by[m] = scale * (2 * uniform01(rng) - 1);
        }
        auto position = [&](double u) {
            Vec2 p{std::cos(u), std::sin(u)};
            for (std::size_t m = 2; m <= modes; ++m) {
                const double cm = std::cos(m * u), sm = std::sin(m * u);
                p += Vec2{ax[m] * cm + bx[m] * sm, ay[m] * cm + by[m] * sm};
            }
            return p;
        };
        auto velocity = [&](double u) {
            Vec2 v{-std::sin(u), std::cos(u)};
            for (std::size_t m = 2; m <= modes; ++m) {
                const double md = static_cast<double>(m);
                const double cm = std::cos(m * u), sm = std::sin(m * u);
                v += md * Vec2{-ax[m] * sm + bx[m] * cm, -ay[m] * sm + by[m] * cm};
            }
            return v;
        };
        // A regular curve is required for arclength sampling.
        bool regular = true;
        for (std::size_t i = 0; i < 4096 && regular; ++i) {
            regular = norm(velocity(two_pi * static_cast<double>(i) / 4096.0)) > 1e-3;
        }
        if (!regular) continue;
        std::vector<Vec2> pts = sample_equal_arclength(position, [&](double u) { return norm(velocity(u)); }, n);
        if (!is_embedded(pts) || signed_area(pts) == 0.0) continue;
        return DiscreteCurve(std::move(pts));
    }
    throw Error(ErrorKind::GenerationFailure, "no embedded fourier curve within the attempt budget",
                "seed=" + std::to_string(seed));
}

namespace detail {
inline double param(const GeneratorParams& p, const std::string& key, double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

inline std::size_t count_param(const GeneratorParams& p, const std::string& key, double fallback) {
    const double v = param(p, key, fallback);
    if (!(v >= 1.0) || v != std::floor(v)) {
        throw Error(ErrorKind::ConfigError, "parameter " + key + " must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}
} // namespace detail

/// Named generator with parameters: circle{r, n}, ellipse{a, b, n},
/// dumbbell{neck, n}, fourier{seed, modes, n}.
inline DiscreteCurve generate(const std::string& name, const GeneratorParams& params) {
    const std::size_t n = detail::count_param(params, "n", 512);
    if (n < min_vertex_count) throw Error(ErrorKind::ConfigError, "n must be at least 8");
    if (name == "circle") return make_circle(detail::param(params, "r", 1.0), n);
    if (name == "ellipse") return make_ellipse(detail::param(params, "a", 2.0), detail::param(params, "b", 1.0), n);
    if (name == "dumbbell") return make_dumbbell(detail::param(params, "neck", 0.2), n);
    if (name == "fourier") {
        const double seed = detail::param(params, "seed", 1.0);
        if (!(seed >= 0.0) || seed != std::floor(seed)) throw Error(ErrorKind::ConfigError, "seed must be a non-negative integer");
        return make_fourier(static_cast<std::uint64_t>(seed), detail::count_param(params, "modes", 6), n);
    }
    throw Error(ErrorKind::ConfigError, "unknown generator", name);
}

} // namespace csf
