#pragma once

#include "npeit/geometry.hpp"
#include "npeit/neumann_green.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace npeit {

/// Raised when the discretization cannot resolve the scene.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OperatorRole { S, K, Kstar, Strace };
enum class QuadratureRule { log_split, trapezoid };
enum class Side { interior, exterior };

/// Orthonormal basis (columns) of the orthogonal complement of u.
Eigen::MatrixXd householder_complement(const Eigen::VectorXd& u);

/// Sum_i w_i a_i b_i.
double weighted_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& w);

/// Nodal values of a density on the inclusion boundary.
class Density {
 public:
  Density(Eigen::VectorXd values, const Eigen::VectorXd& weights);

  const Eigen::VectorXd& values() const { return values_; }
  double weighted_mean() const { return mean_; }
  bool mean_free() const { return mean_free_; }

 private:
  Eigen::VectorXd values_;
  double mean_ = 0.0;
  bool mean_free_ = false;
};

/// Dense nodal realization of a boundary operator. The weighted product is
/// (a | b)_w = sum_i w_i a_i b_i.
struct BoundaryOperator {
  Eigen::MatrixXd matrix;
  OperatorRole role = OperatorRole::S;
  QuadratureRule rule = QuadratureRule::trapezoid;
  Eigen::VectorXd weights;

  Eigen::VectorXd apply(const Eigen::VectorXd& g) const { return matrix * g; }
  /// Matrix of the adjoint in the weighted product, W^{-1} A^T W.
  Eigen::MatrixXd weighted_adjoint() const;
};

/// Bilinear energies of single layer fields u = Sg, v = Sh.
struct EnergyProducts {
  double norm2 = 0.0;       ///< (grad u | grad v) over Omega
  double difference = 0.0;  ///< exterior part minus inclusion part
};

/// Assembled layer operators of an inclusion scene with the Neumann-Green kernel.
class LayerOperators {
 public:
  LayerOperators(InclusionScene scene, std::shared_ptr<const NeumannGreen> green);

  const InclusionScene& scene() const { return scene_; }
  const BoundaryCurve& curve() const { return scene_.inclusion(); }
  const std::shared_ptr<const NeumannGreen>& green() const { return green_; }
  const Eigen::VectorXd& weights() const { return scene_.inclusion().weights(); }
  int size() const { return scene_.inclusion().size(); }

  const BoundaryOperator& free_single_layer() const { return s_free_; }
  const BoundaryOperator& correction_single_layer() const { return s_corr_; }
  /// Trace of the Neumann single layer on the inclusion boundary.
  const BoundaryOperator& single_layer() const { return s_; }
  const BoundaryOperator& free_np_adjoint() const { return kstar_free_; }
  const BoundaryOperator& correction_np_adjoint() const { return kstar_corr_; }
  const BoundaryOperator& np_adjoint() const { return kstar_; }
  const BoundaryOperator& np() const { return k_; }

  /// Maps a density on the inclusion boundary to the single layer trace on the outer boundary.
  const Eigen::MatrixXd& outer_trace() const { return outer_trace_; }

  /// Orthonormal basis (columns) of the complement of W^{1/2} 1. Densities
  /// g = W^{-1/2} B c are exactly mean-free.
  const Eigen::MatrixXd& mean_free_basis() const { return basis_; }

  /// (+-1/2 + K*) g: exterior (+) or interior (-) normal derivative of Sg.
  Eigen::VectorXd side_flux(const Eigen::VectorXd& g, Side side) const;

  /// Energies from boundary identities; both densities must be mean-free.
  EnergyProducts energy_products(const Eigen::VectorXd& g, const Eigen::VectorXd& h) const;

  /// Smallest Rayleigh quotient of the energy form -(g | Sg)_w on mean-free densities.
  double min_energy_rayleigh() const;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  InclusionScene scene_;
  std::shared_ptr<const NeumannGreen> green_;
  BoundaryOperator s_free_, s_corr_, s_, kstar_free_, kstar_corr_, kstar_, k_;
  Eigen::MatrixXd outer_trace_;
  Eigen::MatrixXd basis_;
  std::vector<std::string> warnings_;
};

/// Assembles with the closed-form kernel for a circular outer boundary.
std::shared_ptr<const LayerOperators> assemble_layer_operators(const InclusionScene& scene);

/// Throws ResolutionError below the error threshold of separation / spacing,
/// returns a warning text below the warning threshold.
std::string check_resolution(const InclusionScene& scene);

/// Neumann single layer potential x -> int_{dD} N(x, y) g(y) ds(y).
class PotentialField {
 public:
  PotentialField(std::shared_ptr<const LayerOperators> ops, Eigen::VectorXd density);

  const Eigen::VectorXd& density() const { return density_; }
  const LayerOperators& operators() const { return *ops_; }

  /// Refuses targets closer than three node spacings to the source curve.
  double evaluate(const Point& x) const;
  Point gradient(const Point& x) const;
  Eigen::VectorXd evaluate(const std::vector<Point>& targets) const;
  void gradient(const std::vector<Point>& targets, Eigen::VectorXd& gx,
                Eigen::VectorXd& gy) const;

  /// Same field with a trigonometrically upsampled source quadrature, usable
  /// closer to the curve.
  PotentialField refined(int factor) const;
  /// Smallest admissible distance from the source curve.
  double exclusion_radius() const { return 3.0 * spacing_; }

  Eigen::VectorXd boundary_trace() const;
  Eigen::VectorXd outer_trace() const;
  Eigen::VectorXd side_flux(Side side) const;

 private:
  PotentialField(std::shared_ptr<const LayerOperators> ops, Eigen::VectorXd density,
                 int factor);
  void require_admissible(const std::vector<Point>& targets) const;

  std::shared_ptr<const LayerOperators> ops_;
  Eigen::VectorXd density_;
  BoundaryCurve quad_curve_;
  Eigen::VectorXd charges_;
  double spacing_ = 0.0;
  std::shared_ptr<const CorrectionPotential> correction_;
};

/// Tensor quadrature on the ruled region between an inner curve (or a point)
/// and an outer curve sharing the angular parameter: x = p(t) + s (q(t) - p(t)).
class AreaQuadrature {
 public:
  static AreaQuadrature inside(const CurveShape& curve, int n_theta);
  static AreaQuadrature between(const CurveShape& inner, const CurveShape& outer, int n_theta);

  const std::vector<Point>& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  using GradientField =
      std::function<void(const std::vector<Point>&, Eigen::VectorXd&, Eigen::VectorXd&)>;
  /// Integral of |grad u|^2.
  double gradient_energy(const GradientField& grad) const;

 private:
  static AreaQuadrature ruled(const std::function<Point(double)>& inner,
                              const std::function<Point(double)>& inner_d,
                              const CurveShape& outer, int n_theta);
  std::vector<Point> nodes_;
  Eigen::VectorXd weights_;
};

/// Upsampling factor making every quadrature node admissible for `field`.
int refinement_for(const PotentialField& field, const AreaQuadrature& quad);

}  // namespace npeit
