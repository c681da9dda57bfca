#pragma once

#include <Eigen/Dense>

#include <vector>

namespace npeit {

/// Kress weights R_j(t_i) for integral over [0, 2pi) of ln(4 sin^2((t_i - s)/2)) phi(s) ds,
/// on N = 2n equispaced nodes.
Eigen::MatrixXd kress_log_weights(int n_nodes);

/// Trigonometric interpolant of equispaced samples, evaluated on m equispaced points.
Eigen::VectorXd trig_resample(const Eigen::VectorXd& values, int m);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// 32-point Gauss-Legendre rule mapped to [a, b].
GaussRule gauss_legendre(double a, double b);

}  // namespace npeit
