#pragma once

#include "npeit/layer_ops.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace npeit {

enum class Family { plus, minus, zero };

std::string to_string(Family f);

/// One eigenpair of the Neumann-Poincare operator on the mean-free subspace.
struct NPMode {
  int index = 0;  ///< 1-based within the family
  Family family = Family::zero;
  double mu = 0.0;        ///< eigenvalue of the operational K*
  double mu_classical = 0.0;  ///< -mu, the eigenvalue under the classical kernel sign
  double lambda = 0.0;    ///< energy quotient, -2 mu_classical
  Eigen::VectorXd density;  ///< unit energy, mean-free
  double residual = 0.0;    ///< energy norm of K* g - mu g
};

class NPSpectrum {
 public:
  NPSpectrum(std::shared_ptr<const LayerOperators> ops, std::vector<NPMode> modes);

  const std::vector<NPMode>& modes() const { return modes_; }
  std::vector<const NPMode*> family(Family f) const;
  const LayerOperators& operators() const { return *ops_; }
  const std::shared_ptr<const LayerOperators>& operators_ptr() const { return ops_; }
  /// Single layer potential of the mode density, with unit gradient energy over Omega.
  PotentialField potential(const NPMode& mode) const;

 private:
  std::shared_ptr<const LayerOperators> ops_;
  std::vector<NPMode> modes_;
};

/// Zero-family threshold on |lambda|.
inline constexpr double kFamilyTolerance = 1e-10;

/// The n_modes eigenpairs of largest |lambda|, grouped by family (+, -, 0) and
/// sorted by |lambda| descending within each family. Requires n_modes <= N/4.
NPSpectrum solve_spectrum(std::shared_ptr<const LayerOperators> ops, int n_modes);

/// (exterior energy - inclusion energy) / total energy of the single layer of g.
double energy_quotient(const LayerOperators& ops, const Eigen::VectorXd& g);

struct OrthogonalityReport {
  Eigen::MatrixXd inclusion;  ///< (grad phi_i | grad phi_j) over D
  Eigen::MatrixXd exterior;   ///< same over Omega minus closure(D)
  double max_within_family = 0.0;  ///< largest off-diagonal entry of either part, same family
  double max_cross_family = 0.0;   ///< largest full-domain entry, different families
  double max_unit_energy_error = 0.0;
};

OrthogonalityReport orthogonality_report(const NPSpectrum& spectrum);

/// Columns index,family,mu,lambda,residual.
void write_spectrum_csv(std::ostream& os, const NPSpectrum& spectrum);

}  // namespace npeit
