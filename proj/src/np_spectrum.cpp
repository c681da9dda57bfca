#include "npeit/np_spectrum.hpp"

#include "npeit/numeric_format.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace npeit {

std::string to_string(Family f) {
  switch (f) {
    case Family::plus: return "plus";
    case Family::minus: return "minus";
    case Family::zero: return "zero";
  }
  return "zero";
}

NPSpectrum::NPSpectrum(std::shared_ptr<const LayerOperators> ops, std::vector<NPMode> modes)
    : ops_(std::move(ops)), modes_(std::move(modes)) {}

std::vector<const NPMode*> NPSpectrum::family(Family f) const {
  std::vector<const NPMode*> out;
  for (const auto& m : modes_)
    if (m.family == f) out.push_back(&m);
  return out;
}

PotentialField NPSpectrum::potential(const NPMode& mode) const {
  return PotentialField(ops_, mode.density);
}

NPSpectrum solve_spectrum(std::shared_ptr<const LayerOperators> ops, int n_modes) {
  const int n = ops->size();
  if (n_modes < 1 || n_modes > n / 4)
    throw std::invalid_argument("mode count must lie in [1, N/4]");
  const Eigen::VectorXd& w = ops->weights();
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::VectorXd isw = sw.cwiseInverse();
  const Eigen::MatrixXd& b = ops->mean_free_basis();

  // Energy form and K* in orthonormal mean-free coordinates.
  Eigen::MatrixXd p = -(sw.asDiagonal() * ops->single_layer().matrix * isw.asDiagonal());
  p = 0.5 * (p + p.transpose()).eval();
  const Eigen::MatrixXd pr = b.transpose() * p * b;
  const Eigen::MatrixXd kr =
      b.transpose() * (sw.asDiagonal() * ops->np_adjoint().matrix * isw.asDiagonal()) * b;

  Eigen::LLT<Eigen::MatrixXd> llt(pr);
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "single layer energy form is numerically indefinite; try N = " << 2 * n;
    throw ResolutionError(os.str());
  }
  // M = L^T K_r L^{-T} is symmetric by the Plemelj identity.
  Eigen::MatrixXd m = llt.matrixU() * kr;
  m = llt.matrixU().transpose().solve(m.transpose()).transpose();
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("NP eigensolver failed");

  const Eigen::Index dim = m.rows();
  std::vector<Eigen::Index> order(dim);
  for (Eigen::Index i = 0; i < dim; ++i) order[i] = i;
  const Eigen::VectorXd& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return std::abs(ev[i]) > std::abs(ev[j]); });
  order.resize(n_modes);

  std::vector<NPMode> modes;
  for (Eigen::Index k : order) {
    NPMode md;
    md.mu = ev[k];
    md.mu_classical = -md.mu;
    md.lambda = -2.0 * md.mu_classical;
    md.family = md.lambda > kFamilyTolerance    ? Family::plus
                : md.lambda < -kFamilyTolerance ? Family::minus
                                                : Family::zero;
    const Eigen::VectorXd c = llt.matrixU().solve(es.eigenvectors().col(k));
    Eigen::VectorXd g = isw.asDiagonal() * (b * c);
    const double gmax = g.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < g.size(); ++i)
      if (std::abs(g[i]) > 1e-8 * gmax) {
        if (g[i] < 0.0) g = -g;
        break;
      }
    Eigen::VectorXd r = ops->np_adjoint().matrix * g - md.mu * g;
    r.array() -= w.dot(r) / w.sum();
    md.residual = std::sqrt(std::abs(ops->energy_products(r, r).norm2));
    md.density = std::move(g);
    modes.push_back(std::move(md));
  }

  std::vector<NPMode> grouped;
  for (Family f : {Family::plus, Family::minus, Family::zero}) {
    int index = 0;
    for (auto& md : modes)
      if (md.family == f) {
        md.index = ++index;
        grouped.push_back(md);
      }
  }
  return NPSpectrum(std::move(ops), std::move(grouped));
}

double energy_quotient(const LayerOperators& ops, const Eigen::VectorXd& g) {
  const EnergyProducts e = ops.energy_products(g, g);
  if (!(e.norm2 > 0.0)) throw std::invalid_argument("energy quotient of a zero density");
  return e.difference / e.norm2;
}

OrthogonalityReport orthogonality_report(const NPSpectrum& spectrum) {
  const LayerOperators& ops = spectrum.operators();
  const auto& modes = spectrum.modes();
  const auto n = static_cast<Eigen::Index>(modes.size());
  const Eigen::VectorXd& w = ops.weights();
  OrthogonalityReport rep;
  rep.inclusion.resize(n, n);
  rep.exterior.resize(n, n);
  std::vector<Eigen::VectorXd> sg, fin, fout;
  for (const auto& md : modes) {
    sg.push_back(ops.single_layer().matrix * md.density);
    fin.push_back(ops.side_flux(md.density, Side::interior));
    fout.push_back(ops.side_flux(md.density, Side::exterior));
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      rep.inclusion(i, j) = weighted_dot(sg[i], fin[j], w);
      rep.exterior(i, j) = -weighted_dot(sg[i], fout[j], w);
      const double total = rep.inclusion(i, j) + rep.exterior(i, j);
      if (i == j) {
        rep.max_unit_energy_error = std::max(rep.max_unit_energy_error, std::abs(total - 1.0));
      } else if (modes[i].family == modes[j].family) {
        rep.max_within_family = std::max(
            {rep.max_within_family, std::abs(rep.inclusion(i, j)), std::abs(rep.exterior(i, j))});
      } else {
        rep.max_cross_family = std::max(rep.max_cross_family, std::abs(total));
      }
    }
  return rep;
}

void write_spectrum_csv(std::ostream& os, const NPSpectrum& spectrum) {
  os << "index,family,mu,lambda,residual\n";
  for (const auto& md : spectrum.modes())
    os << md.index << ',' << to_string(md.family) << ',' << format_number(md.mu) << ','
       << format_number(md.lambda) << ',' << format_number(md.residual) << '\n';
}

}  // namespace npeit
