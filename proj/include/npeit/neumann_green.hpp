#pragma once

#include "npeit/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/LU>

#include <memory>
#include <vector>

namespace npeit {

/// Sign and scaling record of the Green function.
///
/// Layer operators use G(x) = ln|x| / (2 pi), which is minus the classical
/// fundamental solution E(x) = -ln|x| / (2 pi). Hence Delta N(., y) = delta_y
/// for N = G + R, and the outward flux of N(., y) on the outer boundary is the
/// constant 1/|dOmega|.
struct GreenConvention {
  double fundamental_sign = -1.0;  ///< G = fundamental_sign * E
  double normalization = 0.0;      ///< 1 / (2 pi)
  double boundary_flux = 0.0;      ///< d_nu N(., y) on dOmega
};

/// Classical fundamental solution E(x) = -ln|x| / (2 pi). Throws at x = 0.
double fundamental_solution(const Point& x);
Point fundamental_solution_gradient(const Point& x);
/// Operational kernel G = -E.
double operational_kernel(const Point& x);
Point operational_kernel_gradient(const Point& x);

/// Free-space single layer and adjoint double layer on a closed curve, with the
/// augmented interior Neumann solver.
class FreeSpaceLayer {
 public:
  explicit FreeSpaceLayer(BoundaryCurve curve);

  const BoundaryCurve& curve() const { return curve_; }
  /// Nodal single layer trace S (log-split quadrature).
  const Eigen::MatrixXd& single_layer() const { return s_; }
  /// Nodal adjoint double layer K* (outward normal, free space).
  const Eigen::MatrixXd& np_adjoint() const { return kstar_; }

  /// Mean-free density sigma with interior flux (-1/2 + K*) sigma = flux.
  /// The columns of `flux` must have zero weighted sum.
  Eigen::MatrixXd solve_interior_neumann(const Eigen::MatrixXd& flux) const;

  /// Single layer of `density` at off-curve targets (plain trapezoid).
  Eigen::MatrixXd potential_matrix(const std::vector<Point>& targets) const;
  void gradient_matrices(const std::vector<Point>& targets, Eigen::MatrixXd& gx,
                         Eigen::MatrixXd& gy) const;

 private:
  BoundaryCurve curve_;
  Eigen::MatrixXd s_;
  Eigen::MatrixXd kstar_;
  Eigen::PartialPivLU<Eigen::MatrixXd> neumann_lu_;
};

/// x -> sum_j R(x, y_j) q_j for fixed sources y_j and charges q_j.
class CorrectionPotential {
 public:
  virtual ~CorrectionPotential() = default;
  virtual Eigen::VectorXd values(const std::vector<Point>& targets) const = 0;
  virtual void gradients(const std::vector<Point>& targets, Eigen::VectorXd& gx,
                         Eigen::VectorXd& gy) const = 0;
};

/// Neumann-Green function N(x, y) = G(x - y) + R(x, y) of a bounded domain.
class NeumannGreen {
 public:
  virtual ~NeumannGreen() = default;

  const BoundaryCurve& outer() const { return outer_; }
  const GreenConvention& convention() const { return convention_; }

  /// R(x_i, y_j).
  virtual Eigen::MatrixXd correction_matrix(const std::vector<Point>& targets,
                                            const std::vector<Point>& sources) const = 0;
  /// Components of grad_x R(x_i, y_j).
  virtual void correction_gradient_matrices(const std::vector<Point>& targets,
                                            const std::vector<Point>& sources,
                                            Eigen::MatrixXd& gx, Eigen::MatrixXd& gy) const = 0;
  /// R(z_i, y_j) for the outer boundary nodes z_i.
  virtual Eigen::MatrixXd outer_trace_correction(const std::vector<Point>& sources) const = 0;
  virtual std::shared_ptr<const CorrectionPotential> correction_potential(
      const std::vector<Point>& sources, const Eigen::VectorXd& charges) const = 0;

  /// Throws unless y is strictly inside the outer domain.
  void require_interior(const Point& y) const;

 protected:
  explicit NeumannGreen(BoundaryCurve outer);

 private:
  BoundaryCurve outer_;
  GreenConvention convention_;
};

/// Closed form by reflection in a circle.
class DiskNeumannGreen final : public NeumannGreen {
 public:
  explicit DiskNeumannGreen(BoundaryCurve circle);

  Eigen::MatrixXd correction_matrix(const std::vector<Point>& targets,
                                    const std::vector<Point>& sources) const override;
  void correction_gradient_matrices(const std::vector<Point>& targets,
                                    const std::vector<Point>& sources, Eigen::MatrixXd& gx,
                                    Eigen::MatrixXd& gy) const override;
  Eigen::MatrixXd outer_trace_correction(const std::vector<Point>& sources) const override;
  std::shared_ptr<const CorrectionPotential> correction_potential(
      const std::vector<Point>& sources, const Eigen::VectorXd& charges) const override;

  double correction(const Point& x, const Point& y) const;
  Point correction_gradient(const Point& x, const Point& y) const;

 private:
  Point center_;
  double radius_;
};

/// Correction R(., y) = S sigma_y + c_y from a second-kind integral equation on dOmega.
class NumericNeumannGreen final : public NeumannGreen {
 public:
  explicit NumericNeumannGreen(BoundaryCurve outer);

  Eigen::MatrixXd correction_matrix(const std::vector<Point>& targets,
                                    const std::vector<Point>& sources) const override;
  void correction_gradient_matrices(const std::vector<Point>& targets,
                                    const std::vector<Point>& sources, Eigen::MatrixXd& gx,
                                    Eigen::MatrixXd& gy) const override;
  Eigen::MatrixXd outer_trace_correction(const std::vector<Point>& sources) const override;
  std::shared_ptr<const CorrectionPotential> correction_potential(
      const std::vector<Point>& sources, const Eigen::VectorXd& charges) const override;

  const FreeSpaceLayer& layer() const { return *layer_; }

  /// Densities sigma_j (columns) and offsets c_j of R(., y_j).
  void correction_densities(const std::vector<Point>& sources, Eigen::MatrixXd& sigma,
                            Eigen::VectorXd& offsets) const;

 private:
  std::shared_ptr<const FreeSpaceLayer> layer_;
};

/// Picks the closed form for circular outer boundaries, the integral equation otherwise.
std::shared_ptr<const NeumannGreen> make_neumann_green(const BoundaryCurve& outer);
std::shared_ptr<const NeumannGreen> green_disk(const BoundaryCurve& outer);
std::shared_ptr<const NeumannGreen> green_numeric(const BoundaryCurve& outer);

/// N(., y) for a fixed source y.
class GreenKernel {
 public:
  GreenKernel(std::shared_ptr<const NeumannGreen> green, const Point& y);

  const Point& source() const { return y_; }
  const GreenConvention& convention() const { return green_->convention(); }

  double value(const Point& x) const;
  Point gradient(const Point& x) const;
  double correction(const Point& x) const;
  Point correction_gradient(const Point& x) const;
  /// N(z_i, y) at the outer boundary nodes.
  Eigen::VectorXd outer_trace() const;
  /// Outward normal derivative of N(., y) at the outer boundary nodes.
  Eigen::VectorXd outer_flux() const;

 private:
  std::shared_ptr<const NeumannGreen> green_;
  Point y_;
  std::shared_ptr<const CorrectionPotential> correction_;
};

}  // namespace npeit
