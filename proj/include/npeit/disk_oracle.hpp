#pragma once

#include <array>

namespace npeit {

/// Separated mode u = c r^m cos(m theta) in r < r0 and (a r^m + b r^{-m}) cos(m theta)
/// in r0 < r < 1, for the unit outer disk.
struct ModeSolution {
  int m = 0;
  double r0 = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  /// Continuity at r0, flux condition at r0, outer Neumann condition.
  std::array<double, 3> residuals{};

  double value(double r) const;
  /// Coefficient of cos(m theta) in the trace on r = 1.
  double trace_coefficient() const { return a + b; }
  double inclusion_trace() const;
  double interior_flux() const;
  double exterior_flux() const;
  double max_residual() const;
};

/// Transmission mode with k0 d_r u = f_coeff cos(m theta) on r = 1.
ModeSolution oracle_transmission_mode(int m, double k0, double k, double r0, double f_coeff);

/// Neumann single layer of the density cos(m theta) on r = r0.
ModeSolution oracle_single_layer_mode(int m, double r0);

struct NPEigenOracle {
  double mu = 0.0;        ///< eigenvalue of the operational K*
  double mu_classical = 0.0;  ///< same operator under the classical kernel sign
  double lambda = 0.0;    ///< (exterior - inclusion energy) / total energy
  double outer_flux_residual = 0.0;
};

NPEigenOracle oracle_np_eigenvalue(int m, double r0);

enum class LimitKind { dirichlet_zero, conductor };

/// cos(m theta) coefficient of the limit trace for data d_r u = (f_coeff / k0) cos(m theta).
double oracle_limit_mode(int m, double k0, double r0, LimitKind kind, double f_coeff = 1.0);

}  // namespace npeit
