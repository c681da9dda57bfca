#include "npeit/geometry.hpp"

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace npeit;

namespace {

constexpr double kPi = std::numbers::pi;

BoundaryCurve circle(double cx, double cy, double r, int n = 128) {
  return make_curve(CurveShape::circle({cx, cy}, r), n);
}

BoundaryCurve star3(int n = 128) {
  return make_curve(CurveShape::star({0, 0}, 1.0, {{3, 0.2}}), n);
}

// Brute-force discrete Hausdorff distance between two point sets.
double discrete_hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
  auto directed = [](const std::vector<Point>& p, const std::vector<Point>& q) {
    double sup = 0.0;
    for (const auto& x : p) {
      double inf = std::numeric_limits<double>::infinity();
      for (const auto& y : q) inf = std::min(inf, (x - y).norm());
      sup = std::max(sup, inf);
    }
    return sup;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace

TEST(BoundaryCurve, CircleIdentities) {
  const auto c = circle(0, 0, 1, 64);
  EXPECT_NEAR(c.length(), 2 * kPi, 1e-12 * 2 * kPi);
  for (int i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(c.curvature()[i], 1.0, 1e-13);
    EXPECT_NEAR(c.normals()[i].norm(), 1.0, 1e-15);
    EXPECT_NEAR(c.normals()[i].dot(c.nodes()[i]), 1.0, 1e-14);
  }
  EXPECT_GT(c.signed_area(), 0.0);
  EXPECT_NEAR(c.signed_area(), kPi, 1e-12);
}

TEST(BoundaryCurve, DegenerateEllipseIsCircle) {
  const auto c = circle(0, 0, 1, 64);
  const auto e = make_curve(CurveShape::ellipse({0, 0}, 1, 1), 64);
  for (int i = 0; i < 64; ++i) {
    EXPECT_NEAR((c.nodes()[i] - e.nodes()[i]).norm(), 0.0, 1e-15);
    EXPECT_NEAR((c.normals()[i] - e.normals()[i]).norm(), 0.0, 1e-15);
    EXPECT_NEAR(c.weights()[i], e.weights()[i], 1e-15);
  }
}

TEST(BoundaryCurve, StarLengthMatchesAdaptiveQuadrature) {
  const auto s = star3(128);
  const CurveShape& shape = s.shape();
  auto speed = [&](double t) { return shape.derivative(t).norm(); };
  const double oracle =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(speed, 0.0, 2 * kPi, 15, 1e-15);
  EXPECT_NEAR(s.length(), oracle, 1e-10);
}

TEST(BoundaryCurve, RejectsBadInput) {
  EXPECT_THROW(make_curve(CurveShape::circle({0, 0}, 1), 15), GeometryError);
  EXPECT_THROW(make_curve(CurveShape::circle({0, 0}, 1), 14), GeometryError);
  EXPECT_THROW(make_curve(CurveShape::star({0, 0}, 1.0, {{3, 1.2}}), 64), GeometryError);
  EXPECT_THROW(make_curve(CurveShape::circle({0, 0}, -1), 64), GeometryError);
}

TEST(CurveGrammar, RoundTrip) {
  for (const char* text : {"circle 0 0 1", "ellipse 0.25 -0.5 1.5 0.75", "star 0 0 1 3:0.2 5:-0.05"}) {
    const CurveShape s = parse_curve(text);
    EXPECT_EQ(parse_curve(format_curve(s)), s) << text;
  }
  const CurveShape third = CurveShape::circle({1.0 / 3.0, 0}, 0.1);
  EXPECT_EQ(parse_curve(format_curve(third)), third);
  EXPECT_THROW(parse_curve("square 0 0 1"), GeometryError);
  EXPECT_THROW(parse_curve("circle 0 0"), GeometryError);
  EXPECT_THROW(parse_curve("circle 0 0 1x"), GeometryError);
  EXPECT_THROW(parse_curve("star 0 0 1 3-0.2"), GeometryError);
}

TEST(Contains, Basics) {
  const auto c = circle(0, 0, 1);
  EXPECT_TRUE(contains(c, {0, 0}));
  EXPECT_FALSE(contains(c, {2, 0}));
  EXPECT_TRUE(contains(star3(), {1.15, 0}));
  EXPECT_THROW(contains(c, c.nodes()[5]), IndeterminateLocation);
  // Close but classifiable points, both sides.
  EXPECT_TRUE(contains(c, {1.0 - 1e-6, 0}));
  EXPECT_FALSE(contains(c, {1.0 + 1e-6, 0}));
}

TEST(Contains, StarAgreesWithRadialComparison) {
  const auto s = star3(256);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), rad(0.0, 1.5);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const double t = ang(rng), rho = rad(rng);
    const double r = 1.0 + 0.2 * std::cos(3 * t);
    if (std::abs(rho - r) < 1e-6) continue;
    EXPECT_EQ(contains(s, {rho * std::cos(t), rho * std::sin(t)}), rho < r);
    ++checked;
  }
  EXPECT_GT(checked, 1900);
}

TEST(Conductivity, PiecewiseConstant) {
  const InclusionScene scene(circle(0, 0, 1), circle(0, 0, 0.5), 1.0);
  EXPECT_EQ(conductivity_at(scene, 5.0, {0.1, 0.0}), 5.0);
  EXPECT_EQ(conductivity_at(scene, 5.0, {0.7, 0.0}), 1.0);
  EXPECT_EQ(conductivity_at(scene, 1.0, {0.1, 0.0}), 1.0);
  EXPECT_EQ(conductivity_at(scene, 1.0, {0.7, 0.0}), 1.0);
  EXPECT_THROW(conductivity_at(scene, 5.0, scene.inclusion().nodes()[3]), IndeterminateLocation);
}

TEST(InclusionScene, RejectsInclusionOutside) {
  EXPECT_THROW(InclusionScene(circle(0, 0, 1), circle(0.8, 0, 0.5), 1.0), GeometryError);
  EXPECT_THROW(InclusionScene(circle(0, 0, 1), circle(0, 0, 0.5), 0.0), GeometryError);
}

TEST(ShapeMetrics, AnnulusExamples) {
  const Region annulus(circle(0, 0, 1), {circle(0, 0, 0.5)});
  const Region disk(circle(0, 0, 1));
  const Region big(circle(0, 0, 1.25));
  EXPECT_NEAR(hausdorff_distance(annulus, disk), 0.5, 1e-9);
  EXPECT_NEAR(modified_distance(annulus, disk), 0.0, 1e-9);
  EXPECT_NEAR(hausdorff_distance(annulus, big), 0.5, 1e-9);
  EXPECT_NEAR(modified_distance(annulus, big), 0.25, 1e-9);
}

TEST(ShapeMetrics, IdenticalCurves) {
  const auto s = star3();
  EXPECT_EQ(hausdorff_distance(s, s), 0.0);
  EXPECT_EQ(modified_distance(s, s), 0.0);
}

TEST(ShapeMetrics, ShiftedDisksMatchBruteForce) {
  const auto a = circle(0, 0, 1, 64), b = circle(0.3, 0, 1, 64);
  const auto fa = circle(0, 0, 1, 4096), fb = circle(0.3, 0, 1, 4096);
  const double oracle = discrete_hausdorff(fa.nodes(), fb.nodes());
  EXPECT_NEAR(hausdorff_distance(a, b), oracle, 1e-6);
  EXPECT_NEAR(hausdorff_distance(a, b), 0.3, 1e-9);
}

TEST(ShapeMetrics, TangentDisks) {
  for (double t : {0.02, 0.05, 0.1}) {
    const auto a = circle(0, 0, 0.4), b = circle(t, 0, 0.4 - t);
    EXPECT_NEAR(hausdorff_distance(a, b), 2 * t, 1e-9);
    EXPECT_NEAR(modified_distance(a, b), 2 * t, 1e-9);
  }
}

TEST(ShapeMetrics, ConcentricDisksEquality) {
  const auto a = circle(0.1, -0.2, 0.3), b = circle(0.1, -0.2, 0.7);
  EXPECT_NEAR(hausdorff_distance(a, b), 0.4, 1e-9);
  EXPECT_NEAR(modified_distance(a, b), 0.4, 1e-9);
}

TEST(ShapeMetrics, MetricPropertiesOnRandomDisks) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> c(-0.5, 0.5), r(0.2, 0.8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = circle(c(rng), c(rng), r(rng)), b = circle(c(rng), c(rng), r(rng)),
               d = circle(c(rng), c(rng), r(rng));
    const double ab = hausdorff_distance(a, b), ba = hausdorff_distance(b, a);
    EXPECT_NEAR(ab, ba, 1e-10);
    EXPECT_LE(ab, hausdorff_distance(a, d) + hausdorff_distance(d, b) + 1e-10);
    EXPECT_LE(modified_distance(a, b), ab + 1e-10);
    // Two disks: d_H = |c1 - c2| + |r1 - r2|.
    const double exact = (a.shape().center - b.shape().center).norm() + std::abs(a.shape().a - b.shape().a);
    EXPECT_NEAR(ab, exact, 1e-9);
  }
}
