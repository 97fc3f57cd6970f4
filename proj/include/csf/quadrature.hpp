#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace csf {

/// Fixed-order Gauss-Legendre rule on [-1, 1]; nodes found by Newton
/// iteration on the three-term Legendre recurrence.
template <std::size_t Order>
struct GaussLegendre {
    std::array<double, Order> nodes{};
    std::array<double, Order> weights{};

    GaussLegendre() {
        constexpr std::size_t n = Order;
        for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (std::size_t k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                    p0 = p1;
                    p1 = pk;
                }
                dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    template <class Fn>
    double integrate(Fn&& fn, double lo, double hi) const {
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        double acc = 0.0;
        for (std::size_t i = 0; i < Order; ++i) acc += weights[i] * fn(mid + half * nodes[i]);
        return acc * half;
    }

    /// Composite rule with `panels` equal sub-intervals.
    template <class Fn>
    double integrate(Fn&& fn, double lo, double hi, std::size_t panels) const {
        const double width = (hi - lo) / static_cast<double>(panels);
        double acc = 0.0;
        for (std::size_t p = 0; p < panels; ++p) {
            acc += integrate(fn, lo + width * static_cast<double>(p), lo + width * static_cast<double>(p + 1));
        }
        return acc;
    }
};

inline const GaussLegendre<20>& gauss_legendre_20() {
    static const GaussLegendre<20> rule;
    return rule;
}

} // namespace csf
