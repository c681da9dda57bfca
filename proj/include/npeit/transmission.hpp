#pragma once

#include "npeit/layer_ops.hpp"
#include "npeit/np_spectrum.hpp"

#include <Eigen/Dense>
#include <Eigen/LU>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace npeit {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// a cos(m t) or a sin(m t) in the outer curve parameter; m = 0 is the constant.
struct FourierTerm {
  bool sine = false;
  int m = 0;
  double coeff = 0.0;
  bool operator==(const FourierTerm&) const = default;
};

/// Parses "c0:1 c1:0.5 s2:-1"; throws std::invalid_argument.
std::vector<FourierTerm> parse_fourier(const std::string& text);
std::string format_fourier(const std::vector<FourierTerm>& terms);

/// Current density f at the outer boundary nodes.
class NeumannData {
 public:
  NeumannData(const BoundaryCurve& outer, Eigen::VectorXd values);
  static NeumannData fourier(const BoundaryCurve& outer, std::vector<FourierTerm> terms);

  const Eigen::VectorXd& values() const { return values_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double weighted_mean() const { return mean_; }
  /// f minus its weighted mean.
  Eigen::VectorXd mean_free() const;
  double l2_norm() const;
  const std::optional<std::vector<FourierTerm>>& fourier_terms() const { return terms_; }

 private:
  Eigen::VectorXd values_;
  Eigen::VectorXd weights_;
  double mean_ = 0.0;
  std::optional<std::vector<FourierTerm>> terms_;
};

/// Nodal function on the outer boundary with its quadrature.
struct BoundaryTrace {
  CurveShape shape;
  Eigen::VectorXd weights;
  Eigen::VectorXd values;
};

/// Weighted L2 distance of the zero-mean parts. Throws std::invalid_argument on
/// traces over different node sets.
double trace_distance(const BoundaryTrace& a, const BoundaryTrace& b);

/// Harmonic H in Omega with d_nu H = mean-free f / k0 and zero boundary mean,
/// as a free-space single layer on the outer boundary.
struct BackgroundField {
  Eigen::VectorXd sigma;
  double offset = 0.0;
  Eigen::VectorXd outer_trace;      ///< H on dOmega
  Eigen::VectorXd inclusion_trace;  ///< H on dD
  Eigen::VectorXd inclusion_flux;   ///< d_nu H on dD
};

struct TransmissionSolution {
  double k = 0.0;
  double k0 = 0.0;
  double lambda = 0.0;  ///< (k + k0) / (2 (k - k0))
  double subtracted_mean = 0.0;
  BackgroundField background;
  Eigen::VectorXd density;          ///< phi on dD, mean-free
  Eigen::VectorXd inclusion_trace;  ///< u on dD, same constant as `trace`
  Eigen::VectorXd inclusion_flux;   ///< interior normal derivative of u on dD
  BoundaryTrace trace;              ///< u on dOmega, zero weighted mean
  double variational_residual = 0.0;
  std::vector<std::string> warnings;
};

struct LimitSolution {
  bool conductor = false;
  BackgroundField background;
  Eigen::VectorXd density;  ///< psi on dD
  double constant = 0.0;    ///< u^0 = H + S psi + constant
  double inclusion_value = 0.0;  ///< u^0 on dD: zero, or the conductor potential
  BoundaryTrace trace0;     ///< unnormalized trace u^0
  double boundary_mean = 0.0;
  BoundaryTrace trace;  ///< u^0 - boundary_mean
  Eigen::VectorXd exterior_flux;  ///< exterior normal derivative of u^0 on dD
  double boundary_residual = 0.0;
  double energy = 0.0;  ///< |grad u^0|^2 over the exterior region
  bool regularized = false;
};

struct DerivativeField {
  int order = 0;
  Eigen::VectorXd density;          ///< phi_j
  Eigen::VectorXd inclusion_trace;  ///< u^(j) on dD
  Eigen::VectorXd inclusion_flux;   ///< interior flux of u^(j) on dD
  BoundaryTrace trace;
  double v_norm = 0.0;  ///< gradient norm over Omega
  double variational_residual = 0.0;
};

struct GradientBoundReport {
  double k = 0.0;
  double grad_v_inclusion = 0.0;  ///< area quadrature
  double grad_v_boundary = 0.0;   ///< boundary identity
  double limit_energy = 0.0;      ///< |grad u~| over the exterior region
  double trace_constant = 0.0;    ///< C0
  double f_norm = 0.0;
  double M = 0.0;
  double ratio = 0.0;  ///< |grad v|_D sqrt(k) / M
};

struct ExpansionEntry {
  Family family = Family::zero;
  int index = 0;
  double lambda = 0.0;
  double A_system = 0.0;
  double A_projection = 0.0;
  double B = 0.0;
  double gap = 0.0;
};

struct ExpansionCoefficients {
  double k = 0.0;
  int J = 0;
  std::vector<ExpansionEntry> entries;
  Eigen::MatrixXd gram;      ///< (grad phi_i | grad phi_j) over D
  double system_residual = 0.0;
  double max_gap = 0.0;
  double reconstruction_error = 0.0;  ///< trace distance of the truncated expansion
  double parseval_sum = 0.0;          ///< sum of A^2
  double v_energy = 0.0;              ///< |grad v|^2 over Omega
};

struct ReconstructionPoint {
  int J = 0;
  double error = 0.0;
  double parseval = 0.0;
};

struct BoundaryMeanReport {
  double m1 = 0.0;
  double m2 = 0.0;
  double sup_difference = 0.0;
  int shared_points = 0;
  bool holds = false;
};

/// Forward solves on one scene. Operators and factorizations independent of
/// k are built once.
class TransmissionSolver {
 public:
  explicit TransmissionSolver(std::shared_ptr<const LayerOperators> ops);

  const LayerOperators& operators() const { return *ops_; }
  const std::shared_ptr<const LayerOperators>& operators_ptr() const { return ops_; }
  const InclusionScene& scene() const { return ops_->scene(); }
  const FreeSpaceLayer& outer_layer() const { return *outer_; }

  BackgroundField background(const NeumannData& f) const;
  TransmissionSolution solve(const NeumannData& f, double k) const;
  LimitSolution solve_limit_dirichlet(const NeumannData& f) const;
  LimitSolution solve_limit_conductor(const NeumannData& f) const;
  /// Orders 0..j_max of d^j u / dk^j.
  std::vector<DerivativeField> k_derivatives(const NeumannData& f, double k, int j_max) const;

  /// Probe residual of the weak form against single layers of cos/sin(m t), m = 1..8.
  double variational_residual(const TransmissionSolution& sol, const NeumannData& f) const;

  /// sqrt of the largest eigenvalue of the outer Neumann-to-Dirichlet map with
  /// an insulated inclusion.
  double trace_constant() const;

  GradientBoundReport gradient_bound_check(const TransmissionSolution& sol,
                                           const LimitSolution& limit,
                                           const NeumannData& f) const;

  /// u on dOmega or inside Omega; 0 inside the inclusion for limit fields.
  Eigen::VectorXd evaluate(const LimitSolution& limit, const std::vector<Point>& points) const;
  Eigen::VectorXd evaluate(const TransmissionSolution& sol, const std::vector<Point>& points) const;

  BoundaryTrace make_trace(Eigen::VectorXd values) const;

 private:
  Eigen::VectorXd solve_np(double lambda, const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd background_values(const BackgroundField& h,
                                    const std::vector<Point>& points) const;
  LimitSolution solve_limit(const NeumannData& f, bool conductor) const;

  std::shared_ptr<const LayerOperators> ops_;
  std::shared_ptr<const FreeSpaceLayer> outer_;
  Eigen::MatrixXd h_value_;  ///< outer density -> H on dD
  Eigen::MatrixXd h_flux_;   ///< outer density -> d_nu H on dD
  Eigen::MatrixXd kr_;       ///< K* in orthonormal mean-free coordinates
  mutable std::optional<double> trace_constant_;
};

TransmissionSolution solve_transmission(const InclusionScene& scene, const NeumannData& f,
                                        double k);
LimitSolution solve_limit_dirichlet(const InclusionScene& scene, const NeumannData& f);
LimitSolution solve_limit_conductor(const InclusionScene& scene, const NeumannData& f);

/// Both routes for the first J modes of every nonempty family.
ExpansionCoefficients expansion_coefficients(const TransmissionSolver& solver,
                                             const NeumannData& f, double k,
                                             const NPSpectrum& spectrum, int J);

/// Reconstruction error and partial Parseval sums for J = 1..J_max.
std::vector<ReconstructionPoint> reconstruction_curve(const TransmissionSolver& solver,
                                                      const NeumannData& f, double k,
                                                      const NPSpectrum& spectrum, int J_max);

/// k0 dA_j/dk from the differentiated coefficient identity.
Eigen::VectorXd coefficient_derivatives(const TransmissionSolver& solver, const NeumannData& f,
                                        double k, const NPSpectrum& spectrum, int J);

/// Boundary means of the zero Dirichlet limits of two inclusions sharing a
/// boundary point, and the sup of the difference of the normalized limits over
/// the boundary of the union.
BoundaryMeanReport boundary_mean_check(const TransmissionSolver& a, const TransmissionSolver& b,
                                      const NeumannData& f);

}  // namespace npeit
