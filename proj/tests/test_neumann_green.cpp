#include "npeit/neumann_green.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace npeit;

namespace {

constexpr double kPi = std::numbers::pi;

BoundaryCurve unit_circle(int n = 256) { return make_curve(CurveShape::circle({0, 0}, 1), n); }
BoundaryCurve ellipse(int n = 256) { return make_curve(CurveShape::ellipse({0, 0}, 1.2, 0.8), n); }

std::vector<std::pair<Point, Point>> random_pairs(int count, double rmax, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), rad(0, 1);
  auto pick = [&] {
    const double r = rmax * std::sqrt(rad(rng)), t = ang(rng);
    return Point(r * std::cos(t), r * std::sin(t));
  };
  std::vector<std::pair<Point, Point>> out;
  while (static_cast<int>(out.size()) < count) {
    Point x = pick(), y = pick();
    if ((x - y).norm() > 1e-3) out.emplace_back(x, y);
  }
  return out;
}

// Boundary quadrature of a function over the outer nodes.
double boundary_integral(const BoundaryCurve& c, const Eigen::VectorXd& v) {
  return c.weights().dot(v);
}

}  // namespace

TEST(FundamentalSolution, Values) {
  EXPECT_NEAR(fundamental_solution({1, 0}), 0.0, 1e-16);
  EXPECT_NEAR(fundamental_solution({0, std::exp(-2 * kPi)}), 1.0, 1e-14);
  EXPECT_THROW(fundamental_solution({0, 0}), std::domain_error);
  EXPECT_DOUBLE_EQ(operational_kernel({0.3, 0.4}), -fundamental_solution({0.3, 0.4}));
}

TEST(FundamentalSolution, GradientMatchesCentralDifferences) {
  const Point x(0.3, 0.4);
  const double h = 1e-5;
  const Point g = fundamental_solution_gradient(x);
  const Point fd((fundamental_solution(x + Point(h, 0)) - fundamental_solution(x - Point(h, 0))) / (2 * h),
                 (fundamental_solution(x + Point(0, h)) - fundamental_solution(x - Point(0, h))) / (2 * h));
  EXPECT_LE((g - fd).norm() / g.norm(), 1e-6);
}

TEST(GreenDisk, CentredSourceMatchesRadialSolve) {
  // Radial oracle: N(r) = A ln r + B with N'(1) = 1/(2 pi) and zero boundary mean.
  const double a = 1.0 / (2 * kPi);
  const double b = 0.0;
  const GreenKernel n(green_disk(unit_circle()), {0, 0});
  EXPECT_NEAR(n.value({0.5, 0}), a * std::log(0.5) + b, 1e-14);
  EXPECT_NEAR(n.value({0.5, 0}), -0.11032, 1e-5);
}

TEST(GreenDisk, Symmetry) {
  const auto green = green_disk(unit_circle());
  const Point x(0.3, 0.1), y(-0.2, 0.4);
  EXPECT_LE(std::abs(GreenKernel(green, y).value(x) - GreenKernel(green, x).value(y)), 1e-10);
  for (auto [p, q] : random_pairs(20, 0.9, 3))
    EXPECT_LE(std::abs(GreenKernel(green, q).value(p) - GreenKernel(green, p).value(q)), 1e-9);
}

TEST(GreenDisk, FluxAndNormalization) {
  const auto c = unit_circle();
  for (const Point y : {Point(0, 0), Point(0.3, -0.5), Point(-0.7, 0.1)}) {
    const GreenKernel n(green_disk(c), y);
    const Eigen::VectorXd flux = n.outer_flux();
    EXPECT_NEAR(boundary_integral(c, flux), 1.0, 1e-12);
    EXPECT_NEAR((flux.array() - 1.0 / (2 * kPi)).abs().maxCoeff(), 0.0, 1e-12);
    EXPECT_LE(std::abs(boundary_integral(c, n.outer_trace())), 1e-9);
  }
}

TEST(GreenDisk, ScaledAndShiftedDisk) {
  const auto c = make_curve(CurveShape::circle({0.5, -1.0}, 2.0), 256);
  const GreenKernel n(green_disk(c), {0.9, -0.3});
  const Eigen::VectorXd flux = n.outer_flux();
  EXPECT_NEAR((flux.array() - 1.0 / c.length()).abs().maxCoeff(), 0.0, 1e-12);
  EXPECT_LE(std::abs(boundary_integral(c, n.outer_trace())), 1e-9);
}

TEST(GreenDisk, CorrectionIsHarmonic) {
  const GreenKernel n(green_disk(unit_circle()), {0.4, 0.2});
  const Point centre(-0.3, -0.2);
  const double rho = 0.25;
  double mean = 0.0;
  const int m = 64;
  for (int i = 0; i < m; ++i) {
    const double t = 2 * kPi * i / m;
    mean += n.correction(centre + rho * Point(std::cos(t), std::sin(t))) / m;
  }
  EXPECT_NEAR(mean, n.correction(centre), 1e-8);
}

TEST(GreenDisk, CorrectionIsNotTranslationCovariant) {
  const auto g = green_disk(unit_circle());
  const Point x(0.1, 0.0), y(-0.1, 0.2), shift(0.3, 0.1);
  const double r1 = GreenKernel(g, y).correction(x);
  const double r2 = GreenKernel(g, y + shift).correction(x + shift);
  EXPECT_GT(std::abs(r1 - r2), 1e-3);
  EXPECT_DOUBLE_EQ(operational_kernel(x - y), operational_kernel((x + shift) - (y + shift)));
}

TEST(GreenDisk, RejectsExteriorSource) {
  EXPECT_THROW(GreenKernel(green_disk(unit_circle()), {1.2, 0}), std::domain_error);
  EXPECT_THROW(green_disk(ellipse()), std::invalid_argument);
}

TEST(GreenNumeric, MatchesClosedFormOnCircle) {
  const auto c = unit_circle();
  const auto disk = green_disk(c);
  const auto num = green_numeric(c);
  for (auto [x, y] : random_pairs(20, 0.7, 5))
    EXPECT_NEAR(GreenKernel(num, y).value(x), GreenKernel(disk, y).value(x), 1e-8);
}

TEST(GreenNumeric, EllipseContracts) {
  const auto c = ellipse();
  const auto g = green_numeric(c);
  for (auto [x, y] : random_pairs(10, 0.6, 9)) {
    EXPECT_LE(std::abs(GreenKernel(g, y).value(x) - GreenKernel(g, x).value(y)), 1e-8);
  }
  for (const Point y : {Point(0, 0), Point(0.5, 0.3)}) {
    const GreenKernel n(g, y);
    EXPECT_NEAR(boundary_integral(c, n.outer_flux()), 1.0, 1e-10);
    EXPECT_LE(std::abs(boundary_integral(c, n.outer_trace())), 1e-9);
  }
}

TEST(GreenNumeric, CorrectionIsHarmonic) {
  const GreenKernel n(green_numeric(ellipse()), {0.3, 0.1});
  const Point centre(-0.2, 0.1);
  const double rho = 0.2;
  double mean = 0.0;
  const int m = 64;
  for (int i = 0; i < m; ++i) {
    const double t = 2 * kPi * i / m;
    mean += n.correction(centre + rho * Point(std::cos(t), std::sin(t))) / m;
  }
  EXPECT_NEAR(mean, n.correction(centre), 1e-8);
}

TEST(GreenConvention, Recorded) {
  const auto c = unit_circle();
  const GreenKernel n(green_disk(c), {0, 0});
  EXPECT_EQ(n.convention().fundamental_sign, -1.0);
  EXPECT_NEAR(n.convention().normalization, 1 / (2 * kPi), 1e-17);
  EXPECT_NEAR(n.convention().boundary_flux, 1 / c.length(), 1e-17);
}
