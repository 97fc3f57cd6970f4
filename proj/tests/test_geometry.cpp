#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "csf/analytic.hpp"
#include "csf/cyclic_tridiagonal.hpp"
#include "csf/generators.hpp"
#include "csf/geometry.hpp"
#include "csf/quadrature.hpp"

using namespace csf;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<Vec2> lemniscate(std::size_t n) {
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = two_pi * static_cast<double>(i) / static_cast<double>(n);
        const double s = std::sin(u), c = std::cos(u);
        pts.push_back({c / (1 + s * s), s * c / (1 + s * s)});
    }
    return pts;
}

std::vector<Vec2> square_side_one(std::size_t per_side) {
    std::vector<Vec2> pts;
    const Vec2 corners[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    for (int c = 0; c < 4; ++c) {
        const Vec2 a = corners[c], b = corners[(c + 1) % 4];
        for (std::size_t k = 0; k < per_side; ++k) pts.push_back(a + (b - a) * (static_cast<double>(k) / per_side));
    }
    return pts;
}

} // namespace

TEST(DiscreteCurve, RejectsTooFewVertices) {
    std::vector<Vec2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    EXPECT_THROW(DiscreteCurve{pts}, Error);
}

TEST(DiscreteCurve, RejectsRepeatedVertexAndNonFinite) {
    const DiscreteCurve circle = make_circle(1.0, 16);
    const auto pts = circle.vertices();
    std::vector<Vec2> dup(pts.begin(), pts.end());
    dup[3] = dup[2];
    try {
        DiscreteCurve c(dup);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateCurve);
    }
    std::vector<Vec2> bad(pts.begin(), pts.end());
    bad[5].x = std::nan("");
    try {
        DiscreteCurve c(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NumericalBlowup);
    }
}

TEST(DiscreteCurve, ClockwiseInputIsReoriented) {
    const DiscreteCurve circle = make_circle(1.0, 32);
    const auto ccw = circle.vertices();
    std::vector<Vec2> cw(ccw.rbegin(), ccw.rend());
    DiscreteCurve c(cw);
    EXPECT_GT(c.area(), 0.0);
    EXPECT_EQ(c[0].x, cw[0].x);
    EXPECT_EQ(c[0].y, cw[0].y);
}

TEST(Frame, UnitCircleCurvatureAndLength) {
    const std::size_t n = 256;
    const CurveFrame fr = build_frame(make_circle(1.0, n));
    // Regular n-gon inscribed in the unit circle: exact values.
    const double h = pi / n;
    EXPECT_NEAR(fr.length, 2 * n * std::sin(h), 1e-13);
    EXPECT_NEAR(fr.length, two_pi, 1e-3);
    for (double k : fr.curvature) EXPECT_NEAR(k, h / std::sin(h), 1e-10);
    EXPECT_NEAR(fr.total_turning(), two_pi, 1e-12);
    EXPECT_NEAR(fr.mean_sq_curvature, (h / std::sin(h)) * (h / std::sin(h)), 1e-10);
}

TEST(Frame, RadiusTwoScaling) {
    const CurveFrame fr = build_frame(make_circle(2.0, 256));
    EXPECT_NEAR(fr.length, 4 * pi, 1e-3);
    for (double k : fr.curvature) EXPECT_NEAR(k, 0.5, 1e-4);
}

TEST(Frame, NormalsPointOutwardOnCounterclockwiseCurve) {
    const CurveFrame fr = build_frame(make_circle(1.0, 64));
    for (std::size_t i = 0; i < fr.size(); ++i) EXPECT_GT(dot(fr.normals[i], fr.positions[i]), 0.99);
}

TEST(Frame, EllipseCurvatureAtMajorVertex) {
    // Closed form k = ab / (a^2 sin^2 u + b^2 cos^2 u)^{3/2}.
    const DiscreteCurve e = make_ellipse(2.0, 1.0, 512);
    const CurveFrame fr = build_frame(e);
    std::size_t best = 0;
    for (std::size_t i = 0; i < fr.size(); ++i) {
        if (norm(fr.positions[i] - Vec2{2, 0}) < norm(fr.positions[best] - Vec2{2, 0})) best = i;
    }
    EXPECT_NEAR(fr.curvature[best], 2.0, 2e-3);
    const AnalyticEllipse ae{2.0, 1.0};
    EXPECT_NEAR(ae.curvature(0.0), 2.0, 1e-15);
    EXPECT_NEAR(ae.curvature(pi / 2), 0.25, 1e-15);
}

TEST(Embedding, CircleLemniscateDumbbell) {
    EXPECT_TRUE(is_embedded(make_circle(1.0, 128)));
    EXPECT_FALSE(is_embedded(std::span<const Vec2>(lemniscate(200))));
    const DiscreteCurve thin = make_dumbbell(0.05, 512);
    EXPECT_TRUE(is_embedded(thin));
    // Brute-force all-pairs segment test without any pruning.
    const auto v = thin.vertices();
    const std::size_t n = v.size();
    double closest = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            closest = std::min(closest, detail::segment_distance(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]));
        }
    }
    EXPECT_GT(closest, 0.0);
}

TEST(Embedding, RequireEmbeddedThrowsNotEmbedded) {
    try {
        require_embedded(DiscreteCurve(lemniscate(200)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotEmbedded);
    }
}

TEST(ChordArc, CircleQuarterAndAntipodal) {
    const CurveFrame fr = build_frame(canonical_scale(make_circle(1.0, 256)));
    const double r = fr.length / two_pi;  // about 1
    const ChordArc q = chord_arc(fr, 0, 64);
    EXPECT_NEAR(q.arc, pi / 2, 1e-12);
    EXPECT_NEAR(q.chord, std::sqrt(2.0), 1e-4);
    const ChordArc opp = chord_arc(fr, 10, 138);
    EXPECT_NEAR(opp.arc, pi, 1e-12);
    EXPECT_NEAR(opp.chord, 2.0, 1e-4);
    EXPECT_NEAR(r, 1.0, 1e-12);
    EXPECT_THROW(chord_arc(fr, 3, 3), Error);
}

TEST(ChordArc, EllipseMinorAxisEnds) {
    // Perimeter oracle: complete elliptic integral by Gauss-Legendre.
    const AnalyticEllipse ae{2.0, 1.0};
    const double perimeter = ae.perimeter();
    EXPECT_NEAR(perimeter, 9.68844822054768, 1e-12);
    const CurveFrame fr = build_frame(make_ellipse(2.0, 1.0, 512));
    // Vertex 0 sits at (2, 0); with equal-arclength sampling 128 and 384 are
    // the minor-axis ends.
    const ChordArc ca = chord_arc(fr, 128, 384);
    EXPECT_NEAR(ca.chord, 2.0, 1e-3);
    EXPECT_NEAR(ca.arc, perimeter / 2, 1e-3);
}

TEST(ChordArc, ArcIsShorterSide) {
    const CurveFrame fr = build_frame(make_ellipse(2.0, 1.0, 128));
    for (std::size_t i = 0; i < 128; i += 7) {
        for (std::size_t j = 0; j < 128; j += 5) {
            if (i == j) continue;
            const ChordArc ca = chord_arc(fr, i, j);
            EXPECT_LE(ca.arc, fr.length / 2 + 1e-12);
            EXPECT_LE(ca.chord, ca.arc + 1e-12);
        }
    }
}

TEST(Resample, CircleCountChangeKeepsLength) {
    const DiscreteCurve c = make_circle(1.0, 256);
    const DiscreteCurve r = resample_uniform(c, 128);
    EXPECT_EQ(r.size(), 128u);
    EXPECT_NEAR(r.length(), c.length(), 1e-3);
}

TEST(Resample, UniformCurveIsFixed) {
    const DiscreteCurve c = make_circle(1.0, 64);
    const DiscreteCurve r = resample_uniform(c, 64);
    for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(norm(r[i] - c[i]), 0.0, 1e-12);
}

TEST(Resample, AngleUniformEllipseBecomesArclengthUniform) {
    std::vector<Vec2> pts;
    const std::size_t n = 512;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = two_pi * static_cast<double>(i) / n;
        pts.push_back({2 * std::cos(u), std::sin(u)});
    }
    auto spread = [](const CurveFrame& fr) {
        const auto [lo, hi] = std::minmax_element(fr.edge_lengths.begin(), fr.edge_lengths.end());
        return (*hi - *lo) / fr.mean_edge();
    };
    const double before = spread(build_frame(DiscreteCurve(pts)));
    const double after = spread(build_frame(resample_uniform(DiscreteCurve(pts), n)));
    EXPECT_GT(before, 0.5);
    EXPECT_LT(after, 1e-3);
}

TEST(Scale, CanonicalScale) {
    const DiscreteCurve c3 = make_circle(3.0, 128);
    const DiscreteCurve s3 = canonical_scale(c3);
    EXPECT_NEAR(s3.length(), two_pi, 1e-12);
    EXPECT_NEAR(norm(s3[0]), two_pi / c3.length() * 3.0, 1e-12);

    const DiscreteCurve already = canonical_scale(make_ellipse(2.0, 1.0, 128));
    const DiscreteCurve again = canonical_scale(already);
    for (std::size_t i = 0; i < 128; ++i) EXPECT_NEAR(norm(again[i] - already[i]), 0.0, 1e-12);

    const DiscreteCurve sq(square_side_one(4));
    const DiscreteCurve ssq = canonical_scale(sq);
    EXPECT_NEAR(ssq[4].x, pi / 2, 1e-12);
    EXPECT_NEAR(ssq.length(), two_pi, 1e-12);
}

TEST(Quadrature, GaussLegendreIsExactOnPolynomials) {
    const auto& gl = gauss_legendre_20();
    EXPECT_NEAR(gl.integrate([](double x) { return std::pow(x, 39); }, 0.0, 1.0), 1.0 / 40, 1e-15);
    EXPECT_NEAR(gl.integrate([](double x) { return std::cos(x); }, 0.0, pi / 2), 1.0, 1e-15);
}

TEST(CyclicTridiagonal, MatchesDenseSolve) {
    const std::size_t n = 9;
    std::vector<double> lo(n), di(n), up(n), rhs(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = -0.3 - 0.01 * i;
        up[i] = -0.2 + 0.02 * i;
        di[i] = 2.0 + 0.1 * i;
        rhs[i] = std::sin(1.0 + i);
    }
    CyclicTridiagonal(lo, di, up).solve(rhs, x);
    for (std::size_t i = 0; i < n; ++i) {
        const double ax = lo[i] * x[(i + n - 1) % n] + di[i] * x[i] + up[i] * x[(i + 1) % n];
        EXPECT_NEAR(ax, rhs[i], 1e-13);
    }
}

TEST(Analytic, AdvanceInvertsArc) {
    const AnalyticEllipse ae{3.0, 1.0};
    for (double u0 : {0.0, 0.7, 2.0, 5.5}) {
        const double u1 = ae.advance(u0, 0.37);
        EXPECT_NEAR(ae.arc(u0, u1), 0.37, 1e-13);
        EXPECT_NEAR(ae.chord(u0, u1), norm(ae.position(u1) - ae.position(u0)), 1e-14);
    }
}
