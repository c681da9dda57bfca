#include "npeit/disk_oracle.hpp"
#include "npeit/layer_ops.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace npeit;

namespace {

constexpr double kPi = std::numbers::pi;

InclusionScene concentric(int n = 256, double r0 = 0.5) {
  return InclusionScene(make_curve(CurveShape::circle({0, 0}, 1), n),
                        make_curve(CurveShape::circle({0, 0}, r0), n), 1.0);
}

InclusionScene star_scene(int n = 256) {
  return InclusionScene(make_curve(CurveShape::circle({0, 0}, 1), n),
                        make_curve(CurveShape::star({0.1, 0.05}, 0.4, {{3, 0.08}, {2, 0.03}}), n),
                        1.0);
}

InclusionScene ellipse_scene(int n = 256) {
  return InclusionScene(make_curve(CurveShape::ellipse({0, 0}, 1.2, 0.9), n),
                        make_curve(CurveShape::star({0.0, 0.1}, 0.35, {{3, 0.05}}), n), 1.0);
}

Eigen::VectorXd mode(const BoundaryCurve& c, int m, bool sine = false) {
  Eigen::VectorXd v(c.size());
  for (int i = 0; i < c.size(); ++i)
    v[i] = sine ? std::sin(m * c.parameter(i)) : std::cos(m * c.parameter(i));
  return v;
}

// Random smooth density: trigonometric polynomial of degree <= 10.
Eigen::VectorXd random_smooth(const BoundaryCurve& c, std::mt19937& rng, bool mean_free) {
  std::normal_distribution<double> z;
  Eigen::VectorXd g = Eigen::VectorXd::Constant(c.size(), mean_free ? 0.0 : z(rng));
  for (int m = 1; m <= 10; ++m) {
    const double a = z(rng) / m, b = z(rng) / m;
    g += a * mode(c, m) + b * mode(c, m, true);
  }
  if (mean_free) g.array() -= c.weights().dot(g) / c.length();
  return g;
}

double weighted_norm(const Eigen::MatrixXd& a, const Eigen::VectorXd& w) {
  const Eigen::VectorXd s = w.cwiseSqrt();
  const Eigen::MatrixXd b = s.asDiagonal() * a * s.cwiseInverse().asDiagonal();
  return Eigen::BDCSVD<Eigen::MatrixXd>(b).singularValues()[0];
}

double plemelj_residual(const LayerOperators& ops) {
  const Eigen::MatrixXd& s = ops.single_layer().matrix;
  const Eigen::MatrixXd r = ops.np().matrix * s - s * ops.np_adjoint().matrix;
  return weighted_norm(r, ops.weights());
}

}  // namespace

TEST(SingleLayer, FreePartOnConstantDensity) {
  for (double r0 : {0.5, 1.0}) {
    const FreeSpaceLayer layer(make_curve(CurveShape::circle({0.2, -0.1}, r0), 256));
    const Eigen::VectorXd v = layer.single_layer() * Eigen::VectorXd::Ones(256);
    EXPECT_NEAR((v.array() - r0 * std::log(r0)).abs().maxCoeff(), 0.0, 1e-12);
  }
}

TEST(SingleLayer, WeightedSymmetry) {
  for (const auto& scene : {concentric(), star_scene(), ellipse_scene()}) {
    const LayerOperators ops(scene, make_neumann_green(scene.outer()));
    const Eigen::MatrixXd ws = ops.weights().asDiagonal() * ops.single_layer().matrix;
    EXPECT_LE((ws - ws.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(SingleLayer, ConcentricModeMatchesOracle) {
  const auto ops = assemble_layer_operators(concentric());
  for (int m = 1; m <= 4; ++m) {
    const double oracle = oracle_single_layer_mode(m, 0.5).inclusion_trace();
    for (bool sine : {false, true}) {
      const Eigen::VectorXd g = mode(ops->curve(), m, sine);
      EXPECT_NEAR((ops->single_layer().matrix * g - oracle * g).cwiseAbs().maxCoeff(), 0.0, 1e-8);
    }
  }
}

TEST(SingleLayer, SelfConvergence) {
  const auto coarse = assemble_layer_operators(star_scene(256));
  const auto fine = assemble_layer_operators(star_scene(512));
  auto density = [](const BoundaryCurve& c) {
    Eigen::VectorXd g(c.size());
    for (int i = 0; i < c.size(); ++i) {
      const double t = c.parameter(i);
      g[i] = std::exp(std::cos(t)) * std::sin(2 * t) + 0.3;
    }
    return g;
  };
  const Eigen::VectorXd a = coarse->single_layer().matrix * density(coarse->curve());
  const Eigen::VectorXd b = fine->single_layer().matrix * density(fine->curve());
  double err = 0.0;
  for (int i = 0; i < 256; ++i) err = std::max(err, std::abs(a[i] - b[2 * i]));
  EXPECT_LE(err, 1e-10);
}

TEST(NPAdjoint, FreeCircleFourierModes) {
  const FreeSpaceLayer layer(make_curve(CurveShape::circle({0.3, 0.3}, 0.7), 256));
  const BoundaryCurve& c = layer.curve();
  for (int m = 1; m <= 3; ++m)
    EXPECT_LE((layer.np_adjoint() * mode(c, m)).cwiseAbs().maxCoeff(), 1e-9);
  const Eigen::VectorXd one = layer.np_adjoint() * Eigen::VectorXd::Ones(256);
  EXPECT_NEAR((one.array() - 0.5).abs().maxCoeff(), 0.0, 1e-12);
}

TEST(NPAdjoint, WeightedAdjointOfK) {
  const auto ops = assemble_layer_operators(star_scene());
  std::mt19937 rng(1);
  const Eigen::VectorXd f = random_smooth(ops->curve(), rng, false);
  const Eigen::VectorXd g = random_smooth(ops->curve(), rng, false);
  const Eigen::VectorXd& w = ops->weights();
  const double lhs = weighted_dot(ops->np_adjoint().apply(f), g, w);
  const double rhs = weighted_dot(f, ops->np().apply(g), w);
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
  // Duality with the constant density.
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(ops->size());
  EXPECT_NEAR(w.dot(ops->np_adjoint().apply(f)), weighted_dot(f, ops->np().apply(one), w),
              1e-12 * std::max(1.0, std::abs(lhs)));
}

TEST(NPAdjoint, ConcentricEigenvalue) {
  const auto ops = assemble_layer_operators(concentric());
  const double mu = oracle_np_eigenvalue(1, 0.5).mu;
  EXPECT_NEAR(mu, -0.125, 1e-15);
  const Eigen::VectorXd g = mode(ops->curve(), 1);
  EXPECT_LE((ops->np_adjoint().apply(g) - mu * g).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Plemelj, CircleAndStar) {
  EXPECT_LE(plemelj_residual(*assemble_layer_operators(concentric())), 1e-9);
  EXPECT_LE(plemelj_residual(*assemble_layer_operators(star_scene())), 1e-6);
  EXPECT_LE(plemelj_residual(*assemble_layer_operators(ellipse_scene())), 1e-6);
}

TEST(Positivity, EnergyFormOnMeanFreeSubspace) {
  for (const auto& scene : {concentric(), star_scene(), ellipse_scene()}) {
    const auto ops = assemble_layer_operators(scene);
    EXPECT_GT(ops->min_energy_rayleigh(), 0.0);
  }
}

TEST(JumpRelation, FiftySmoothDensities) {
  std::mt19937 rng(42);
  for (const auto& scene : {concentric(), star_scene()}) {
    const auto ops = assemble_layer_operators(scene);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd g = random_smooth(ops->curve(), rng, false);
      const Eigen::VectorXd jump =
          ops->side_flux(g, Side::exterior) - ops->side_flux(g, Side::interior);
      EXPECT_LE((jump - g).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(SideFlux, ConcentricInteriorCoefficient) {
  const auto ops = assemble_layer_operators(concentric());
  const double oracle = oracle_single_layer_mode(1, 0.5).interior_flux();
  EXPECT_NEAR(oracle, -0.5 * (1 + 0.25), 1e-15);
  const Eigen::VectorXd g = mode(ops->curve(), 1);
  EXPECT_LE((ops->side_flux(g, Side::interior) - oracle * g).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Potential, ZeroDensity) {
  const auto ops = assemble_layer_operators(star_scene());
  const PotentialField f(ops, Eigen::VectorXd::Zero(ops->size()));
  EXPECT_EQ(f.evaluate(Point(0.1, 0.05)), 0.0);
  EXPECT_EQ(f.evaluate(Point(0.8, 0.0)), 0.0);
}

TEST(Potential, ConcentricModeMatchesOracle) {
  const auto ops = assemble_layer_operators(concentric());
  const PotentialField f(ops, mode(ops->curve(), 2));
  const ModeSolution s = oracle_single_layer_mode(2, 0.5);
  for (double r : {0.1, 0.3, 0.4, 0.6, 0.8, 0.95}) {
    for (double t : {0.0, 0.7, 2.0}) {
      const Point x(r * std::cos(t), r * std::sin(t));
      EXPECT_NEAR(f.evaluate(x), s.value(r) * std::cos(2 * t), 1e-8) << r << ' ' << t;
    }
  }
}

TEST(Potential, MeanFreeDensityHasNoOuterFlux) {
  const auto ops = assemble_layer_operators(star_scene());
  std::mt19937 rng(3);
  const PotentialField f(ops, random_smooth(ops->curve(), rng, true));
  // Flux through r = 0.9 equals the flux through the outer boundary.
  const int m = 512;
  std::vector<Point> pts;
  for (int i = 0; i < m; ++i) {
    const double t = 2 * kPi * i / m;
    pts.emplace_back(0.9 * std::cos(t), 0.9 * std::sin(t));
  }
  Eigen::VectorXd gx(m), gy(m);
  f.gradient(pts, gx, gy);
  double flux = 0.0;
  for (int i = 0; i < m; ++i) flux += (gx[i] * pts[i].x() + gy[i] * pts[i].y()) / 0.9 * (2 * kPi * 0.9 / m);
  EXPECT_LE(std::abs(flux), 1e-9);
}

TEST(Potential, HarmonicOffCurve) {
  const auto ops = assemble_layer_operators(star_scene());
  std::mt19937 rng(5);
  const PotentialField f(ops, random_smooth(ops->curve(), rng, false));
  for (const Point c : {Point(0.1, 0.05), Point(-0.7, 0.2)}) {
    const double rho = 0.1;
    const int m = 64;
    double mean = 0.0;
    for (int i = 0; i < m; ++i) {
      const double t = 2 * kPi * i / m;
      mean += f.evaluate(Point(c + rho * Point(std::cos(t), std::sin(t)))) / m;
    }
    EXPECT_NEAR(mean, f.evaluate(c), 1e-7);
  }
}

TEST(Potential, TraceContinuityAcrossCurve) {
  const auto ops = assemble_layer_operators(concentric());
  std::mt19937 rng(8);
  const Eigen::VectorXd g = random_smooth(ops->curve(), rng, false);
  const PotentialField f = PotentialField(ops, g).refined(64);
  const Eigen::VectorXd trace = ops->single_layer().matrix * g;
  // Cubic extrapolation from admissible distances on both sides.
  const int i = 17;
  const Point y = ops->curve().nodes()[i], nu = ops->curve().normals()[i];
  const double d = 2.0 * f.exclusion_radius();
  for (double side : {-1.0, 1.0}) {
    const double v1 = f.evaluate(Point(y + side * d * nu));
    const double v2 = f.evaluate(Point(y + side * 2 * d * nu));
    const double v3 = f.evaluate(Point(y + side * 3 * d * nu));
    const double v4 = f.evaluate(Point(y + side * 4 * d * nu));
    EXPECT_NEAR(4 * v1 - 6 * v2 + 4 * v3 - v4, trace[i], 1e-7);
  }
}

TEST(Potential, RefusesNearCurve) {
  const auto ops = assemble_layer_operators(concentric());
  const PotentialField f(ops, mode(ops->curve(), 1));
  EXPECT_THROW(f.evaluate(Point(0.5 + 1e-4, 0.0)), std::domain_error);
}

TEST(EnergyProducts, ZeroAndNonMeanFree) {
  const auto ops = assemble_layer_operators(concentric());
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(ops->size());
  const EnergyProducts e = ops->energy_products(z, z);
  EXPECT_EQ(e.norm2, 0.0);
  EXPECT_EQ(e.difference, 0.0);
  EXPECT_THROW(ops->energy_products(Eigen::VectorXd::Ones(ops->size()), z), std::invalid_argument);
}

TEST(EnergyProducts, EigenDensityDifference) {
  const auto ops = assemble_layer_operators(concentric());
  const Eigen::VectorXd g = mode(ops->curve(), 1);
  const EnergyProducts e = ops->energy_products(g, g);
  const NPEigenOracle o = oracle_np_eigenvalue(1, 0.5);
  EXPECT_NEAR(o.lambda, -2 * o.mu_classical, 1e-15);
  EXPECT_NEAR(e.difference, o.lambda * e.norm2, 1e-10);
}

TEST(EnergyProducts, NormMatchesAreaQuadrature) {
  const auto ops = assemble_layer_operators(concentric());
  const BoundaryCurve& c = ops->curve();
  const Eigen::VectorXd g = mode(c, 1) + 0.3 * mode(c, 2, true);
  const EnergyProducts e = ops->energy_products(g, g);
  const PotentialField base(ops, g);
  const CurveShape& inner = c.shape();
  const CurveShape& outer = ops->scene().outer().shape();
  const AreaQuadrature qin = AreaQuadrature::inside(inner, 64);
  const AreaQuadrature qout = AreaQuadrature::between(inner, outer, 64);
  auto energy = [&](const AreaQuadrature& q) {
    const PotentialField f = base.refined(refinement_for(base, q));
    return q.gradient_energy([&](const std::vector<Point>& x, Eigen::VectorXd& gx,
                                 Eigen::VectorXd& gy) { f.gradient(x, gx, gy); });
  };
  const double ein = energy(qin), eout = energy(qout);
  EXPECT_NEAR((ein + eout) / e.norm2, 1.0, 1e-4);
  EXPECT_NEAR((eout - ein) / e.difference, 1.0, 1e-4);
}

TEST(Resolution, InclusionTouchingOuterBoundaryRejected) {
  const InclusionScene scene(make_curve(CurveShape::circle({0, 0}, 1), 64),
                             make_curve(CurveShape::circle({0.5, 0}, 0.49), 64), 1.0);
  EXPECT_THROW(assemble_layer_operators(scene), ResolutionError);
}
