#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "stbem/geometry.hpp"

using namespace stbem;

TEST(Geometry, PointsOnBuiltInCurves) {
  const auto c = BoundaryCurve::circle(1.0);
  EXPECT_NEAR(c.point(0.0).x(), 1.0, 1e-15);
  EXPECT_NEAR(c.point(0.0).y(), 0.0, 1e-15);
  EXPECT_NEAR(c.point(1.5).x(), -1.0, 1e-15);
  EXPECT_NEAR(c.point(1.5).y(), 0.0, 1e-15);
  const auto e = BoundaryCurve::ellipse(0.8, 0.5);
  EXPECT_NEAR(e.point(0.25).x(), 0.0, 1e-15);
  EXPECT_NEAR(e.point(0.25).y(), 0.5, 1e-15);
}

TEST(Geometry, ClosedCurve) {
  for (const auto& c : {BoundaryCurve::circle(2.0), BoundaryCurve::ellipse(0.8, 0.5)}) {
    EXPECT_NEAR((c.point(0.0) - c.point(1.0)).norm(), 0.0, 1e-14);
  }
}

TEST(Geometry, NormalsAreUnitOrthogonalOutward) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const auto& c : {BoundaryCurve::circle(1.0), BoundaryCurve::ellipse(0.8, 0.5)}) {
    EXPECT_NEAR(c.normal(0.0).x(), 1.0, 1e-15);
    for (int k = 0; k < 100; ++k) {
      const double u = U(rng);
      const Vec2 n = c.normal(u);
      EXPECT_NEAR(n.norm(), 1.0, 1e-14);
      EXPECT_NEAR(n.dot(c.tangent(u)), 0.0, 1e-12);
      EXPECT_GT(c.level_set(c.point(u) + 1e-6 * n), 0.0);
      EXPECT_LT(c.level_set(c.point(u) - 1e-6 * n), 0.0);
      EXPECT_GT(c.speed(u), 0.0);
    }
  }
}

TEST(Geometry, EllipseNormalMatchesImplicitGradient) {
  const double a = 0.8, b = 0.5;
  const auto c = BoundaryCurve::ellipse(a, b);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double u = U(rng);
    const Vec2 p = c.point(u);
    Vec2 g(2.0 * p.x() / (a * a), 2.0 * p.y() / (b * b));
    g.normalize();
    EXPECT_NEAR((g - c.normal(u)).norm(), 0.0, 1e-12);
  }
}

TEST(Geometry, ArcLengthOfUnitCircleByQuadrature) {
  const auto c = BoundaryCurve::circle(1.0);
  const double L = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double u) { return c.speed(u); }, 0.0, 1.0, 5, 1e-15);
  EXPECT_NEAR(L, 2.0 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(c.length(), 2.0 * std::numbers::pi, 1e-12);
}

TEST(Geometry, EllipseLengthAgainstQuadrature) {
  const auto c = BoundaryCurve::ellipse(0.8, 0.5);
  const double L = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double u) { return c.speed(u); }, 0.0, 1.0, 10, 1e-15);
  EXPECT_NEAR(c.length(), L, 1e-12);
}

TEST(Geometry, ChordAndOffsetAgreeWithPointDifferences) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto c = BoundaryCurve::ellipse(0.8, 0.5);
  for (int k = 0; k < 200; ++k) {
    const double u = U(rng), v = U(rng);
    const Vec2 d = c.point(u) - c.point(v);
    EXPECT_NEAR(c.chord_sq(u, v), d.squaredNorm(), 1e-14);
    EXPECT_NEAR(c.offset_dot_normal(u, v), d.dot(c.normal(v)), 1e-14);
  }
}

TEST(Geometry, MeshSizesAndNesting) {
  const auto c = BoundaryCurve::circle(1.0);
  const auto m0 = mesh(c, 0, 4);
  EXPECT_EQ(m0.size(), 4);
  EXPECT_DOUBLE_EQ(m0.width(), 0.25);
  EXPECT_EQ(mesh(c, 2, 4).size(), 16);
  for (int lev = 0; lev < 5; ++lev) {
    const auto coarse = mesh(c, lev, 4).breakpoints();
    const auto fine = mesh(c, lev + 1, 4).breakpoints();
    ASSERT_EQ(fine.size(), 2 * coarse.size() - 1);
    for (std::size_t k = 0; k < coarse.size(); ++k) EXPECT_DOUBLE_EQ(coarse[k], fine[2 * k]);
    EXPECT_DOUBLE_EQ(fine.front(), 0.0);
    EXPECT_DOUBLE_EQ(fine.back(), 1.0);
  }
}

TEST(Geometry, MeshRejectsEmptyBase) { EXPECT_THROW(mesh(BoundaryCurve::circle(1.0), 0, 0), ConfigError); }
