#include "npeit/layer_ops.hpp"

#include "npeit/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

namespace npeit {

namespace {

constexpr double kPi = std::numbers::pi;

// Separation between the boundaries, in node spacings.
constexpr double kResolutionError = 2.0;
constexpr double kResolutionWarning = 5.0;

}  // namespace

Eigen::MatrixXd householder_complement(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd v = u.normalized();
  const double s = v[0] >= 0.0 ? 1.0 : -1.0;
  v[0] += s;
  const double vv = v.squaredNorm();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - (2.0 / vv) * v * v.transpose();
  return h.rightCols(n - 1);
}

double weighted_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& w) {
  return (a.array() * b.array() * w.array()).sum();
}

Density::Density(Eigen::VectorXd values, const Eigen::VectorXd& weights)
    : values_(std::move(values)) {
  if (values_.size() != weights.size())
    throw std::invalid_argument("density length must match the node count");
  if (!values_.allFinite()) throw std::invalid_argument("density values must be finite");
  mean_ = weights.dot(values_) / weights.sum();
  const double scale = std::max(1.0, values_.cwiseAbs().maxCoeff());
  mean_free_ = std::abs(mean_) <= 1e-12 * scale;
}

Eigen::MatrixXd BoundaryOperator::weighted_adjoint() const {
  return weights.cwiseInverse().asDiagonal() * matrix.transpose() * weights.asDiagonal();
}

// ---------------------------------------------------------------------------

std::string check_resolution(const InclusionScene& scene) {
  const double h = std::max(scene.inclusion().spacing(), scene.outer().spacing());
  const double ratio = scene.separation() / h;
  std::ostringstream os;
  if (ratio < kResolutionError) {
    const int suggested = 2 * std::max(scene.inclusion().size(), scene.outer().size());
    os << "inclusion is " << ratio << " node spacings from the outer boundary; increase N to at least "
       << static_cast<int>(std::ceil(suggested * kResolutionWarning / std::max(ratio, 0.1) / 2.0));
    throw ResolutionError(os.str());
  }
  if (ratio < kResolutionWarning) {
    os << "inclusion is only " << ratio << " node spacings from the outer boundary";
    return os.str();
  }
  return {};
}

LayerOperators::LayerOperators(InclusionScene scene, std::shared_ptr<const NeumannGreen> green)
    : scene_(std::move(scene)), green_(std::move(green)) {
  if (!green_) throw std::invalid_argument("Green function required");
  if (auto w = check_resolution(scene_); !w.empty()) warnings_.push_back(std::move(w));

  const BoundaryCurve& c = scene_.inclusion();
  const int n = c.size();
  const auto& y = c.nodes();
  const auto& nu = c.normals();
  const Eigen::VectorXd& w = c.weights();

  const FreeSpaceLayer free(c);
  auto make = [&](Eigen::MatrixXd m, OperatorRole role, QuadratureRule rule) {
    BoundaryOperator op;
    op.matrix = std::move(m);
    op.role = role;
    op.rule = rule;
    op.weights = w;
    return op;
  };

  Eigen::MatrixXd r = green_->correction_matrix(y, y);
  r = 0.5 * (r + r.transpose()).eval();
  s_free_ = make(free.single_layer(), OperatorRole::S, QuadratureRule::log_split);
  s_corr_ = make(r * w.asDiagonal(), OperatorRole::S, QuadratureRule::trapezoid);
  s_ = make(s_free_.matrix + s_corr_.matrix, OperatorRole::Strace, QuadratureRule::log_split);

  Eigen::MatrixXd gx, gy;
  green_->correction_gradient_matrices(y, y, gx, gy);
  Eigen::MatrixXd kc(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) kc(i, j) = (gx(i, j) * nu[i].x() + gy(i, j) * nu[i].y()) * w[j];
  kstar_free_ = make(free.np_adjoint(), OperatorRole::Kstar, QuadratureRule::trapezoid);
  kstar_corr_ = make(kc, OperatorRole::Kstar, QuadratureRule::trapezoid);
  kstar_ = make(kstar_free_.matrix + kc, OperatorRole::Kstar, QuadratureRule::trapezoid);
  k_ = make(kstar_.weighted_adjoint(), OperatorRole::K, QuadratureRule::trapezoid);

  const BoundaryCurve& outer = scene_.outer();
  outer_trace_ = green_->outer_trace_correction(y);
  for (int i = 0; i < outer.size(); ++i)
    for (int j = 0; j < n; ++j) outer_trace_(i, j) += operational_kernel(outer.nodes()[i] - y[j]);
  outer_trace_ = outer_trace_ * w.asDiagonal();

  basis_ = householder_complement(w.cwiseSqrt());
}

Eigen::VectorXd LayerOperators::side_flux(const Eigen::VectorXd& g, Side side) const {
  const double half = side == Side::exterior ? 0.5 : -0.5;
  return half * g + kstar_.matrix * g;
}

EnergyProducts LayerOperators::energy_products(const Eigen::VectorXd& g,
                                               const Eigen::VectorXd& h) const {
  const Eigen::VectorXd& w = weights();
  if (!Density(g, w).mean_free() || !Density(h, w).mean_free())
    throw std::invalid_argument("energy pairing needs mean-free densities");
  EnergyProducts e;
  const Eigen::VectorXd sh = s_.matrix * h;
  e.norm2 = -weighted_dot(g, sh, w);
  e.difference = -2.0 * weighted_dot(s_.matrix * g, kstar_.matrix * h, w);
  return e;
}

double LayerOperators::min_energy_rayleigh() const {
  const Eigen::VectorXd sw = weights().cwiseSqrt();
  Eigen::MatrixXd m = -(sw.asDiagonal() * s_.matrix * sw.cwiseInverse().asDiagonal());
  m = 0.5 * (m + m.transpose()).eval();
  const Eigen::MatrixXd r = basis_.transpose() * m * basis_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

std::shared_ptr<const LayerOperators> assemble_layer_operators(const InclusionScene& scene) {
  return std::make_shared<LayerOperators>(scene, make_neumann_green(scene.outer()));
}

// ---------------------------------------------------------------------------
// PotentialField

PotentialField::PotentialField(std::shared_ptr<const LayerOperators> ops, Eigen::VectorXd density)
    : PotentialField(std::move(ops), std::move(density), 1) {}

PotentialField::PotentialField(std::shared_ptr<const LayerOperators> ops, Eigen::VectorXd density,
                               int factor)
    : ops_(std::move(ops)),
      density_(std::move(density)),
      quad_curve_(ops_->curve().shape(), ops_->size() * factor) {
  if (density_.size() != ops_->size())
    throw std::invalid_argument("density length must match the node count");
  const Eigen::VectorXd g = factor == 1 ? density_ : trig_resample(density_, quad_curve_.size());
  charges_ = quad_curve_.weights().cwiseProduct(g);
  spacing_ = quad_curve_.spacing();
  correction_ = ops_->green()->correction_potential(quad_curve_.nodes(), charges_);
}

PotentialField PotentialField::refined(int factor) const {
  if (factor < 1) throw std::invalid_argument("refinement factor must be positive");
  return PotentialField(ops_, density_, factor * quad_curve_.size() / ops_->size());
}

void PotentialField::require_admissible(const std::vector<Point>& targets) const {
  for (const auto& x : targets)
    if (project(quad_curve_, x).distance < exclusion_radius())
      throw std::domain_error("potential evaluation too close to the inclusion boundary");
}

Eigen::VectorXd PotentialField::evaluate(const std::vector<Point>& targets) const {
  require_admissible(targets);
  Eigen::VectorXd v = correction_->values(targets);
  const auto& y = quad_curve_.nodes();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) s += operational_kernel(targets[i] - y[j]) * charges_[j];
    v[i] += s;
  }
  return v;
}

void PotentialField::gradient(const std::vector<Point>& targets, Eigen::VectorXd& gx,
                              Eigen::VectorXd& gy) const {
  require_admissible(targets);
  correction_->gradients(targets, gx, gy);
  const auto& y = quad_curve_.nodes();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    Point s = Point::Zero();
    for (std::size_t j = 0; j < y.size(); ++j)
      s += operational_kernel_gradient(targets[i] - y[j]) * charges_[j];
    gx[i] += s.x();
    gy[i] += s.y();
  }
}

double PotentialField::evaluate(const Point& x) const { return evaluate(std::vector<Point>{x})[0]; }

Point PotentialField::gradient(const Point& x) const {
  Eigen::VectorXd gx(1), gy(1);
  gradient(std::vector<Point>{x}, gx, gy);
  return {gx[0], gy[0]};
}

Eigen::VectorXd PotentialField::boundary_trace() const {
  return ops_->single_layer().matrix * density_;
}

Eigen::VectorXd PotentialField::outer_trace() const { return ops_->outer_trace() * density_; }

Eigen::VectorXd PotentialField::side_flux(Side side) const {
  return ops_->side_flux(density_, side);
}

// ---------------------------------------------------------------------------
// AreaQuadrature

AreaQuadrature AreaQuadrature::ruled(const std::function<Point(double)>& inner,
                                     const std::function<Point(double)>& inner_d,
                                     const CurveShape& outer, int n_theta) {
  using Rule = boost::math::quadrature::gauss<double, 16>;
  std::vector<double> s, ws;
  for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
    const double x = Rule::abscissa()[i];
    const double wt = Rule::weights()[i];
    s.push_back(0.5 - 0.5 * x);
    ws.push_back(0.5 * wt);
    if (x != 0.0) {
      s.push_back(0.5 + 0.5 * x);
      ws.push_back(0.5 * wt);
    }
  }
  AreaQuadrature q;
  q.weights_.resize(static_cast<Eigen::Index>(s.size()) * n_theta);
  Eigen::Index k = 0;
  const double dt = 2.0 * kPi / n_theta;
  for (int it = 0; it < n_theta; ++it) {
    const double t = dt * it;
    const Point p = inner(t), pd = inner_d(t);
    const Point o = outer.position(t), od = outer.derivative(t);
    for (std::size_t ir = 0; ir < s.size(); ++ir) {
      const Point xs = o - p;
      const Point xt = pd + s[ir] * (od - pd);
      const double jac = std::abs(xs.x() * xt.y() - xs.y() * xt.x());
      q.nodes_.push_back(p + s[ir] * xs);
      q.weights_[k++] = jac * ws[ir] * dt;
    }
  }
  return q;
}

AreaQuadrature AreaQuadrature::inside(const CurveShape& curve, int n_theta) {
  const Point c = curve.center;
  return ruled([c](double) { return c; }, [](double) { return Point::Zero(); }, curve, n_theta);
}

AreaQuadrature AreaQuadrature::between(const CurveShape& inner, const CurveShape& outer,
                                       int n_theta) {
  return ruled([&inner](double t) { return inner.position(t); },
               [&inner](double t) { return inner.derivative(t); }, outer, n_theta);
}

double AreaQuadrature::gradient_energy(const GradientField& grad) const {
  Eigen::VectorXd gx, gy;
  grad(nodes_, gx, gy);
  return (weights_.array() * (gx.array().square() + gy.array().square())).sum();
}

int refinement_for(const PotentialField& field, const AreaQuadrature& quad) {
  const BoundaryCurve& c = field.operators().curve();
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& x : quad.nodes()) dmin = std::min(dmin, project(c, x).distance);
  const double need = 3.0 * c.spacing() / dmin;
  return std::max(1, static_cast<int>(std::ceil(need * 1.05)));
}

}  // namespace npeit
