#include "npeit/neumann_green.hpp"

#include "npeit/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace npeit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInv2Pi = 0.5 / kPi;

double disk_correction(const Point& c, double rho, const Point& x, const Point& y) {
  const Point xs = (x - c) / rho;
  const Point ys = (y - c) / rho;
  // Unit disk: R = (1/4pi) ln(1 - 2 x.y + |x|^2 |y|^2); rescaling adds -ln(rho)/(2pi).
  const double q = 1.0 - 2.0 * xs.dot(ys) + xs.squaredNorm() * ys.squaredNorm();
  return 0.5 * kInv2Pi * std::log(q) - kInv2Pi * std::log(rho);
}

Point disk_correction_gradient(const Point& c, double rho, const Point& x, const Point& y) {
  const Point xs = (x - c) / rho;
  const Point ys = (y - c) / rho;
  const double q = 1.0 - 2.0 * xs.dot(ys) + xs.squaredNorm() * ys.squaredNorm();
  return 0.5 * kInv2Pi * (-2.0 * ys + 2.0 * ys.squaredNorm() * xs) / (q * rho);
}

class DiskCorrectionPotential final : public CorrectionPotential {
 public:
  DiskCorrectionPotential(const Point& center, double radius, std::vector<Point> sources,
                          Eigen::VectorXd charges)
      : center_(center), radius_(radius), sources_(std::move(sources)),
        charges_(std::move(charges)) {}

  Eigen::VectorXd values(const std::vector<Point>& targets) const override {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(targets.size()));
    for (std::size_t i = 0; i < targets.size(); ++i)
      for (std::size_t j = 0; j < sources_.size(); ++j)
        v[i] += disk_correction(center_, radius_, targets[i], sources_[j]) * charges_[j];
    return v;
  }

  void gradients(const std::vector<Point>& targets, Eigen::VectorXd& gx,
                 Eigen::VectorXd& gy) const override {
    gx = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(targets.size()));
    gy = gx;
    for (std::size_t i = 0; i < targets.size(); ++i)
      for (std::size_t j = 0; j < sources_.size(); ++j) {
        const Point g =
            disk_correction_gradient(center_, radius_, targets[i], sources_[j]) * charges_[j];
        gx[i] += g.x();
        gy[i] += g.y();
      }
  }

 private:
  Point center_;
  double radius_;
  std::vector<Point> sources_;
  Eigen::VectorXd charges_;
};

class LayerCorrectionPotential final : public CorrectionPotential {
 public:
  LayerCorrectionPotential(std::shared_ptr<const FreeSpaceLayer> layer, Eigen::VectorXd density,
                           double offset)
      : layer_(std::move(layer)), density_(std::move(density)), offset_(offset) {}

  Eigen::VectorXd values(const std::vector<Point>& targets) const override {
    Eigen::VectorXd v = layer_->potential_matrix(targets) * density_;
    v.array() += offset_;
    return v;
  }

  void gradients(const std::vector<Point>& targets, Eigen::VectorXd& gx,
                 Eigen::VectorXd& gy) const override {
    Eigen::MatrixXd mx, my;
    layer_->gradient_matrices(targets, mx, my);
    gx = mx * density_;
    gy = my * density_;
  }

 private:
  std::shared_ptr<const FreeSpaceLayer> layer_;
  Eigen::VectorXd density_;
  double offset_;
};

}  // namespace

double fundamental_solution(const Point& x) { return -operational_kernel(x); }

Point fundamental_solution_gradient(const Point& x) { return -operational_kernel_gradient(x); }

double operational_kernel(const Point& x) {
  const double r = x.norm();
  if (r == 0.0) throw std::domain_error("fundamental solution is singular at the origin");
  return kInv2Pi * std::log(r);
}

Point operational_kernel_gradient(const Point& x) {
  const double r2 = x.squaredNorm();
  if (r2 == 0.0) throw std::domain_error("fundamental solution is singular at the origin");
  return kInv2Pi * x / r2;
}

// ---------------------------------------------------------------------------
// FreeSpaceLayer

FreeSpaceLayer::FreeSpaceLayer(BoundaryCurve curve) : curve_(std::move(curve)) {
  const int n = curve_.size();
  const auto& x = curve_.nodes();
  const auto& nu = curve_.normals();
  const auto& sp = curve_.speed();
  const auto& w = curve_.weights();
  const Eigen::MatrixXd rk = kress_log_weights(n);
  const double h = 2.0 * kPi / n;

  s_.resize(n, n);
  kstar_.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const double ti = curve_.parameter(i);
    for (int j = 0; j < n; ++j) {
      double smooth;
      if (i == j) {
        smooth = std::log(sp[i]);
        kstar_(i, j) = curve_.curvature()[i] / (4.0 * kPi) * w[j];
      } else {
        const Point d = x[i] - x[j];
        const double r2 = d.squaredNorm();
        const double sn = std::sin(0.5 * (ti - curve_.parameter(j)));
        smooth = 0.5 * std::log(r2) - 0.5 * std::log(4.0 * sn * sn);
        kstar_(i, j) = kInv2Pi * d.dot(nu[i]) / r2 * w[j];
      }
      s_(i, j) = kInv2Pi * (0.5 * rk(i, j) + h * smooth) * sp[j];
    }
  }

  Eigen::MatrixXd a = kstar_;
  a.diagonal().array() -= 0.5;
  a += Eigen::VectorXd::Ones(n) * w.transpose();
  neumann_lu_.compute(a);
}

Eigen::MatrixXd FreeSpaceLayer::solve_interior_neumann(const Eigen::MatrixXd& flux) const {
  return neumann_lu_.solve(flux);
}

Eigen::MatrixXd FreeSpaceLayer::potential_matrix(const std::vector<Point>& targets) const {
  const int n = curve_.size();
  Eigen::MatrixXd p(static_cast<Eigen::Index>(targets.size()), n);
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (int l = 0; l < n; ++l)
      p(i, l) = kInv2Pi * 0.5 * std::log((targets[i] - curve_.nodes()[l]).squaredNorm()) *
                curve_.weights()[l];
  return p;
}

void FreeSpaceLayer::gradient_matrices(const std::vector<Point>& targets, Eigen::MatrixXd& gx,
                                   Eigen::MatrixXd& gy) const {
  const int n = curve_.size();
  gx.resize(static_cast<Eigen::Index>(targets.size()), n);
  gy.resizeLike(gx);
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (int l = 0; l < n; ++l) {
      const Point d = targets[i] - curve_.nodes()[l];
      const double c = kInv2Pi * curve_.weights()[l] / d.squaredNorm();
      gx(i, l) = c * d.x();
      gy(i, l) = c * d.y();
    }
}

// ---------------------------------------------------------------------------
// NeumannGreen

NeumannGreen::NeumannGreen(BoundaryCurve outer) : outer_(std::move(outer)) {
  convention_.fundamental_sign = -1.0;
  convention_.normalization = kInv2Pi;
  convention_.boundary_flux = 1.0 / outer_.length();
}

void NeumannGreen::require_interior(const Point& y) const {
  bool inside = false;
  try {
    inside = contains(outer_, y);
  } catch (const IndeterminateLocation&) {
    inside = false;
  }
  if (!inside) throw std::domain_error("Green source point must lie strictly inside the domain");
}

// ---------------------------------------------------------------------------
// DiskNeumannGreen

DiskNeumannGreen::DiskNeumannGreen(BoundaryCurve circle) : NeumannGreen(std::move(circle)) {
  const CurveShape& s = outer().shape();
  const bool round = s.kind == CurveKind::circle || (s.kind == CurveKind::ellipse && s.a == s.b);
  if (!round) throw std::invalid_argument("closed-form Neumann function needs a circular domain");
  center_ = s.center;
  radius_ = s.a;
}

double DiskNeumannGreen::correction(const Point& x, const Point& y) const {
  return disk_correction(center_, radius_, x, y);
}

Point DiskNeumannGreen::correction_gradient(const Point& x, const Point& y) const {
  return disk_correction_gradient(center_, radius_, x, y);
}

Eigen::MatrixXd DiskNeumannGreen::correction_matrix(const std::vector<Point>& targets,
                                                    const std::vector<Point>& sources) const {
  Eigen::MatrixXd r(static_cast<Eigen::Index>(targets.size()),
                    static_cast<Eigen::Index>(sources.size()));
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = 0; j < sources.size(); ++j) r(i, j) = correction(targets[i], sources[j]);
  return r;
}

void DiskNeumannGreen::correction_gradient_matrices(const std::vector<Point>& targets,
                                                    const std::vector<Point>& sources,
                                                    Eigen::MatrixXd& gx,
                                                    Eigen::MatrixXd& gy) const {
  gx.resize(static_cast<Eigen::Index>(targets.size()), static_cast<Eigen::Index>(sources.size()));
  gy.resizeLike(gx);
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = 0; j < sources.size(); ++j) {
      const Point g = correction_gradient(targets[i], sources[j]);
      gx(i, j) = g.x();
      gy(i, j) = g.y();
    }
}

Eigen::MatrixXd DiskNeumannGreen::outer_trace_correction(const std::vector<Point>& sources) const {
  for (const auto& y : sources) require_interior(y);
  return correction_matrix(outer().nodes(), sources);
}

std::shared_ptr<const CorrectionPotential> DiskNeumannGreen::correction_potential(
    const std::vector<Point>& sources, const Eigen::VectorXd& charges) const {
  for (const auto& y : sources) require_interior(y);
  return std::make_shared<DiskCorrectionPotential>(center_, radius_, sources, charges);
}

// ---------------------------------------------------------------------------
// NumericNeumannGreen

NumericNeumannGreen::NumericNeumannGreen(BoundaryCurve outer)
    : NeumannGreen(outer), layer_(std::make_shared<FreeSpaceLayer>(std::move(outer))) {}

void NumericNeumannGreen::correction_densities(const std::vector<Point>& sources,
                                               Eigen::MatrixXd& sigma,
                                               Eigen::VectorXd& offsets) const {
  const BoundaryCurve& c = outer();
  const int n = c.size();
  const auto m = static_cast<Eigen::Index>(sources.size());
  const Eigen::VectorXd& w = c.weights();
  const double len = c.length();
  Eigen::MatrixXd flux(n, m);
  Eigen::MatrixXd free_trace(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    require_interior(sources[j]);
    for (int l = 0; l < n; ++l) {
      const Point d = c.nodes()[l] - sources[j];
      flux(l, j) = -operational_kernel_gradient(d).dot(c.normals()[l]) + 1.0 / len;
      free_trace(l, j) = operational_kernel(d);
    }
    // Remove the quadrature residue of the exact zero mean.
    flux.col(j).array() -= w.dot(flux.col(j)) / len;
  }
  sigma = layer_->solve_interior_neumann(flux);
  const Eigen::MatrixXd trace = free_trace + layer_->single_layer() * sigma;
  offsets = -(w.transpose() * trace).transpose() / len;
}

Eigen::MatrixXd NumericNeumannGreen::correction_matrix(const std::vector<Point>& targets,
                                                       const std::vector<Point>& sources) const {
  Eigen::MatrixXd sigma;
  Eigen::VectorXd offsets;
  correction_densities(sources, sigma, offsets);
  Eigen::MatrixXd r = layer_->potential_matrix(targets) * sigma;
  r.rowwise() += offsets.transpose();
  return r;
}

void NumericNeumannGreen::correction_gradient_matrices(const std::vector<Point>& targets,
                                                       const std::vector<Point>& sources,
                                                       Eigen::MatrixXd& gx,
                                                       Eigen::MatrixXd& gy) const {
  Eigen::MatrixXd sigma;
  Eigen::VectorXd offsets;
  correction_densities(sources, sigma, offsets);
  Eigen::MatrixXd px, py;
  layer_->gradient_matrices(targets, px, py);
  gx = px * sigma;
  gy = py * sigma;
}

Eigen::MatrixXd NumericNeumannGreen::outer_trace_correction(
    const std::vector<Point>& sources) const {
  Eigen::MatrixXd sigma;
  Eigen::VectorXd offsets;
  correction_densities(sources, sigma, offsets);
  Eigen::MatrixXd r = layer_->single_layer() * sigma;
  r.rowwise() += offsets.transpose();
  return r;
}

std::shared_ptr<const CorrectionPotential> NumericNeumannGreen::correction_potential(
    const std::vector<Point>& sources, const Eigen::VectorXd& charges) const {
  Eigen::MatrixXd sigma;
  Eigen::VectorXd offsets;
  correction_densities(sources, sigma, offsets);
  return std::make_shared<LayerCorrectionPotential>(layer_, sigma * charges, offsets.dot(charges));
}

std::shared_ptr<const NeumannGreen> green_disk(const BoundaryCurve& outer) {
  return std::make_shared<DiskNeumannGreen>(outer);
}

std::shared_ptr<const NeumannGreen> green_numeric(const BoundaryCurve& outer) {
  return std::make_shared<NumericNeumannGreen>(outer);
}

std::shared_ptr<const NeumannGreen> make_neumann_green(const BoundaryCurve& outer) {
  const CurveShape& s = outer.shape();
  if (s.kind == CurveKind::circle || (s.kind == CurveKind::ellipse && s.a == s.b))
    return green_disk(outer);
  return green_numeric(outer);
}

// ---------------------------------------------------------------------------
// GreenKernel

GreenKernel::GreenKernel(std::shared_ptr<const NeumannGreen> green, const Point& y)
    : green_(std::move(green)), y_(y) {
  green_->require_interior(y_);
  correction_ = green_->correction_potential({y_}, Eigen::VectorXd::Ones(1));
}

double GreenKernel::value(const Point& x) const {
  return operational_kernel(x - y_) + correction(x);
}

Point GreenKernel::gradient(const Point& x) const {
  return operational_kernel_gradient(x - y_) + correction_gradient(x);
}

double GreenKernel::correction(const Point& x) const { return correction_->values({x})[0]; }

Point GreenKernel::correction_gradient(const Point& x) const {
  Eigen::VectorXd gx, gy;
  correction_->gradients({x}, gx, gy);
  return {gx[0], gy[0]};
}

Eigen::VectorXd GreenKernel::outer_trace() const {
  const BoundaryCurve& c = green_->outer();
  Eigen::VectorXd v = green_->outer_trace_correction({y_}).col(0);
  for (int i = 0; i < c.size(); ++i) v[i] += operational_kernel(c.nodes()[i] - y_);
  return v;
}

Eigen::VectorXd GreenKernel::outer_flux() const {
  const BoundaryCurve& c = green_->outer();
  Eigen::VectorXd flux(c.size());
  for (int i = 0; i < c.size(); ++i)
    flux[i] = operational_kernel_gradient(c.nodes()[i] - y_).dot(c.normals()[i]);
  if (const auto* disk = dynamic_cast<const DiskNeumannGreen*>(green_.get())) {
    for (int i = 0; i < c.size(); ++i)
      flux[i] += disk->correction_gradient(c.nodes()[i], y_).dot(c.normals()[i]);
  } else {
    const auto& numeric = dynamic_cast<const NumericNeumannGreen&>(*green_);
    Eigen::MatrixXd sigma;
    Eigen::VectorXd offsets;
    numeric.correction_densities({y_}, sigma, offsets);
    const FreeSpaceLayer& layer = numeric.layer();
    flux += layer.np_adjoint() * sigma.col(0) - 0.5 * sigma.col(0);
  }
  return flux;
}

}  // namespace npeit
