#include "npeit/disk_oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace npeit {

namespace {

constexpr double kResidualLimit = 1e-13;

void check_mode_args(int m, double r0) {
  if (m < 1) throw std::invalid_argument("mode index must be >= 1");
  if (!(r0 > 0.0 && r0 < 1.0)) throw std::invalid_argument("inclusion radius must be in (0, 1)");
}

// Residuals relative to the size of the terms in each matching row.
void certify(ModeSolution& s, const Eigen::Matrix3d& a, const Eigen::Vector3d& rhs) {
  const Eigen::Vector3d x(s.a, s.b, s.c);
  const Eigen::Vector3d r = a * x - rhs;
  for (int i = 0; i < 3; ++i) {
    const double scale =
        std::max({std::abs(rhs[i]), (a.row(i).cwiseAbs().transpose().cwiseProduct(x.cwiseAbs())).maxCoeff(),
                  1e-300});
    s.residuals[i] = std::abs(r[i]) / scale;
  }
  if (s.max_residual() > kResidualLimit)
    throw std::runtime_error("mode matching system is numerically singular");
}

}  // namespace

double ModeSolution::value(double r) const {
  if (r <= r0) return c * std::pow(r, m);
  return a * std::pow(r, m) + b * std::pow(r, -m);
}

double ModeSolution::inclusion_trace() const { return c * std::pow(r0, m); }

double ModeSolution::interior_flux() const { return c * m * std::pow(r0, m - 1); }

double ModeSolution::exterior_flux() const {
  return m * (a * std::pow(r0, m - 1) - b * std::pow(r0, -m - 1));
}

double ModeSolution::max_residual() const {
  return *std::max_element(residuals.begin(), residuals.end());
}

ModeSolution oracle_transmission_mode(int m, double k0, double k, double r0, double f_coeff) {
  check_mode_args(m, r0);
  if (!(k0 > 0.0) || !(k > 0.0)) throw std::invalid_argument("conductivities must be positive");
  if (k == k0) throw std::invalid_argument("k must differ from k0");
  const double p = std::pow(r0, m), q = std::pow(r0, -m);
  Eigen::Matrix3d a;
  // Unknowns (a, b, c).
  a << -p, -q, p,                                     // continuity
      -k0 * m * p / r0, k0 * m * q / r0, k * m * p / r0,  // flux balance
      k0 * m, -k0 * m, 0.0;                            // outer Neumann
  const Eigen::Vector3d rhs(0.0, 0.0, f_coeff);
  const Eigen::Vector3d x = a.fullPivLu().solve(rhs);
  ModeSolution s;
  s.m = m;
  s.r0 = r0;
  s.a = x[0];
  s.b = x[1];
  s.c = x[2];
  certify(s, a, rhs);
  return s;
}

ModeSolution oracle_single_layer_mode(int m, double r0) {
  check_mode_args(m, r0);
  const double p = std::pow(r0, m), q = std::pow(r0, -m);
  Eigen::Matrix3d a;
  a << -p, -q, p,                              // continuity
      m * p / r0, -m * q / r0, -m * p / r0,    // exterior minus interior flux = density
      m, -m, 0.0;                              // no outer flux
  const Eigen::Vector3d rhs(0.0, 1.0, 0.0);
  const Eigen::Vector3d x = a.fullPivLu().solve(rhs);
  ModeSolution s;
  s.m = m;
  s.r0 = r0;
  s.a = x[0];
  s.b = x[1];
  s.c = x[2];
  certify(s, a, rhs);
  return s;
}

NPEigenOracle oracle_np_eigenvalue(int m, double r0) {
  const ModeSolution s = oracle_single_layer_mode(m, r0);
  NPEigenOracle o;
  o.mu = 0.5 * (s.interior_flux() + s.exterior_flux());
  o.mu_classical = -o.mu;
  // Energies per unit angular factor from Green's identity on each side.
  const double e_in = r0 * s.inclusion_trace() * s.interior_flux();
  const double e_out = -r0 * s.inclusion_trace() * s.exterior_flux();
  o.lambda = (e_out - e_in) / (e_out + e_in);
  o.outer_flux_residual = std::abs(m * (s.a - s.b));
  return o;
}

double oracle_limit_mode(int m, double k0, double r0, LimitKind kind, double f_coeff) {
  check_mode_args(m, r0);
  if (!(k0 > 0.0)) throw std::invalid_argument("k0 must be positive");
  // For m >= 1 the equipotential constant and the zero Dirichlet value coincide, so
  // both kinds solve a r0^m + b r0^-m = 0, m (a - b) = f/k0.
  (void)kind;
  const double p = std::pow(r0, m), q = std::pow(r0, -m);
  Eigen::Matrix2d a;
  a << p, q, m, -m;
  const Eigen::Vector2d rhs(0.0, f_coeff / k0);
  const Eigen::Vector2d x = a.fullPivLu().solve(rhs);
  const Eigen::Vector2d r = a * x - rhs;
  const double scale = std::max({std::abs(f_coeff / k0), std::abs(p * x[0]), 1e-300});
  if (r.cwiseAbs().maxCoeff() > kResidualLimit * scale)
    throw std::runtime_error("limit mode system is numerically singular");
  return x[0] + x[1];
}

}  // namespace npeit
