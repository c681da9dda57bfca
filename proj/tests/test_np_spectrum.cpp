#include "npeit/disk_oracle.hpp"
#include "npeit/np_spectrum.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace npeit;

namespace {

std::shared_ptr<const LayerOperators> scene_ops(const CurveShape& inclusion, int n = 256) {
  return assemble_layer_operators(InclusionScene(make_curve(CurveShape::circle({0, 0}, 1), n),
                                                 make_curve(inclusion, n), 1.0));
}

std::shared_ptr<const LayerOperators> concentric_ops() {
  return scene_ops(CurveShape::circle({0, 0}, 0.5));
}

// Elongated inclusion: both families are present.
std::shared_ptr<const LayerOperators> ellipse_ops() {
  return scene_ops(CurveShape::ellipse({0.05, 0}, 0.4, 0.15));
}

Eigen::VectorXd random_mean_free(const BoundaryCurve& c, std::mt19937& rng) {
  std::normal_distribution<double> z;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(c.size());
  for (int m = 1; m <= 12; ++m) {
    const double a = z(rng), b = z(rng);
    for (int i = 0; i < c.size(); ++i)
      g[i] += (a * std::cos(m * c.parameter(i)) + b * std::sin(m * c.parameter(i))) / m;
  }
  g.array() -= c.weights().dot(g) / c.length();
  return g;
}

}  // namespace

TEST(Spectrum, ConcentricMatchesFourierOracle) {
  const NPSpectrum sp = solve_spectrum(concentric_ops(), 16);
  ASSERT_EQ(sp.modes().size(), 16u);
  for (const auto& md : sp.modes()) {
    const int m = (md.index + 1) / 2;  // cos/sin pairs
    const NPEigenOracle o = oracle_np_eigenvalue(m, 0.5);
    EXPECT_EQ(md.family, Family::minus);
    EXPECT_NEAR(md.mu, o.mu, 1e-6) << "m=" << m;
    EXPECT_NEAR(md.lambda, o.lambda, 1e-6);
    EXPECT_NEAR(md.mu, -std::pow(0.5, 2 * m) / 2, 1e-6);
  }
  EXPECT_NEAR(sp.modes()[0].mu, -0.125, 1e-12);
  EXPECT_NEAR(sp.modes()[2].mu, -0.03125, 1e-12);
}

TEST(Spectrum, EigenvaluesBounded) {
  for (const auto& ops : {concentric_ops(), ellipse_ops()}) {
    const NPSpectrum sp = solve_spectrum(ops, ops->size() / 4);
    for (const auto& md : sp.modes()) {
      EXPECT_GE(md.mu, -0.5 - 1e-9);
      EXPECT_LE(md.mu, 0.5 + 1e-9);
    }
  }
}

TEST(Spectrum, RotationInvariance) {
  // Negating the cos(3t) amplitude rotates the star by pi/3.
  const NPSpectrum a = solve_spectrum(scene_ops(CurveShape::star({0, 0}, 0.45, {{3, 0.08}})), 24);
  const NPSpectrum b = solve_spectrum(scene_ops(CurveShape::star({0, 0}, 0.45, {{3, -0.08}})), 24);
  for (std::size_t i = 0; i < a.modes().size(); ++i)
    EXPECT_NEAR(a.modes()[i].mu, b.modes()[i].mu, 1e-9);
}

TEST(Spectrum, NormalizationAndResiduals) {
  for (const auto& ops : {concentric_ops(), ellipse_ops()}) {
    const NPSpectrum sp = solve_spectrum(ops, 32);
    const auto& modes = sp.modes();
    for (std::size_t i = 0; i < modes.size(); ++i) {
      EXPECT_LE(modes[i].residual, 1e-8);
      EXPECT_TRUE(Density(modes[i].density, ops->weights()).mean_free());
      for (std::size_t j = 0; j < modes.size(); ++j) {
        const double e = ops->energy_products(modes[i].density, modes[j].density).norm2;
        EXPECT_NEAR(e, i == j ? 1.0 : 0.0, 1e-9);
      }
    }
  }
}

TEST(Spectrum, RayleighConsistency) {
  for (const auto& ops : {concentric_ops(), ellipse_ops()}) {
    const NPSpectrum sp = solve_spectrum(ops, 32);
    for (const auto& md : sp.modes())
      EXPECT_NEAR(energy_quotient(*ops, md.density), md.lambda, 1e-9);
  }
}

TEST(Spectrum, VariationalExtremality) {
  const auto ops = ellipse_ops();
  const NPSpectrum sp = solve_spectrum(ops, ops->size() / 4);
  const auto plus = sp.family(Family::plus);
  const auto minus = sp.family(Family::minus);
  ASSERT_FALSE(plus.empty());
  ASSERT_FALSE(minus.empty());
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const double q = energy_quotient(*ops, random_mean_free(ops->curve(), rng));
    EXPECT_LE(q, plus.front()->lambda + 1e-12);
    EXPECT_GE(q, minus.front()->lambda - 1e-12);
  }
}

TEST(Spectrum, FamiliesSortedAndIndexedFromOne) {
  const NPSpectrum sp = solve_spectrum(ellipse_ops(), 40);
  for (Family f : {Family::plus, Family::minus, Family::zero}) {
    const auto fam = sp.family(f);
    for (std::size_t i = 0; i < fam.size(); ++i) {
      EXPECT_EQ(fam[i]->index, static_cast<int>(i) + 1);
      if (i > 0) EXPECT_GE(std::abs(fam[i - 1]->lambda), std::abs(fam[i]->lambda));
    }
  }
}

TEST(Spectrum, RejectsTooManyModes) {
  EXPECT_THROW(solve_spectrum(concentric_ops(), 65), std::invalid_argument);
  EXPECT_THROW(solve_spectrum(concentric_ops(), 0), std::invalid_argument);
}

TEST(EnergyQuotient, ConcentricModeAndZero) {
  const auto ops = concentric_ops();
  Eigen::VectorXd g(ops->size());
  for (int i = 0; i < g.size(); ++i) g[i] = std::cos(ops->curve().parameter(i));
  EXPECT_NEAR(energy_quotient(*ops, g), -0.25, 1e-9);
  EXPECT_THROW(energy_quotient(*ops, Eigen::VectorXd::Zero(ops->size())), std::invalid_argument);
}

TEST(EnergyQuotient, AreaQuadratureCrossCheck) {
  const auto ops = scene_ops(CurveShape::star({0, 0}, 0.45, {{3, 0.06}}));
  const NPSpectrum sp = solve_spectrum(ops, 8);
  const NPMode& md = sp.modes().front();
  const PotentialField base = sp.potential(md);
  const AreaQuadrature qin = AreaQuadrature::inside(ops->curve().shape(), 128);
  const AreaQuadrature qout =
      AreaQuadrature::between(ops->curve().shape(), ops->scene().outer().shape(), 128);
  auto energy = [&](const AreaQuadrature& q) {
    const PotentialField f = base.refined(refinement_for(base, q));
    return q.gradient_energy(
        [&](const std::vector<Point>& x, Eigen::VectorXd& gx, Eigen::VectorXd& gy) {
          f.gradient(x, gx, gy);
        });
  };
  const double ein = energy(qin), eout = energy(qout);
  EXPECT_NEAR((eout - ein) / (eout + ein), md.lambda, 1e-4 * std::abs(md.lambda));
}

TEST(Orthogonality, WithinAndAcrossFamilies) {
  for (const auto& ops : {concentric_ops(), ellipse_ops()}) {
    const NPSpectrum sp = solve_spectrum(ops, 32);
    const OrthogonalityReport rep = orthogonality_report(sp);
    EXPECT_LE(rep.max_within_family, 1e-8);
    EXPECT_LE(rep.max_cross_family, 1e-8);
    EXPECT_LE(rep.max_unit_energy_error, 1e-9);
  }
}

TEST(SpectrumCsv, RowCountAndHeader) {
  const NPSpectrum sp = solve_spectrum(concentric_ops(), 10);
  std::ostringstream os;
  write_spectrum_csv(os, sp);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "index,family,mu,lambda,residual");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 10);
}
