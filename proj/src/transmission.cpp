#include "npeit/transmission.hpp"

#include "npeit/numeric_format.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace npeit {

namespace {

constexpr int kProbeModes = 8;
constexpr double kResonanceMargin = 1e-6;
constexpr double kMinRcond = 1e-14;
constexpr double kTikhonovScale = 1e-12;
constexpr int kMaxRefinement = 64;

double weighted_mean(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  return w.dot(v) / w.sum();
}

Eigen::VectorXd remove_mean(Eigen::VectorXd v, const Eigen::VectorXd& w) {
  v.array() -= weighted_mean(v, w);
  return v;
}

// Mean-free cos/sin(m t) densities on the inclusion, m = 1..kProbeModes.
std::vector<Eigen::VectorXd> probe_densities(const BoundaryCurve& c) {
  std::vector<Eigen::VectorXd> out;
  for (int m = 1; m <= kProbeModes; ++m)
    for (int s = 0; s < 2; ++s) {
      Eigen::VectorXd h(c.size());
      for (int i = 0; i < c.size(); ++i)
        h[i] = s == 0 ? std::cos(m * c.parameter(i)) : std::sin(m * c.parameter(i));
      out.push_back(remove_mean(std::move(h), c.weights()));
    }
  return out;
}

// Values of a single layer field, refining the source quadrature as needed.
// Entries that stay inadmissible are NaN.
Eigen::VectorXd layer_values(const PotentialField& base, const std::vector<Point>& points) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
  std::vector<PotentialField> levels{base};
  for (int f = 2; f <= kMaxRefinement; f *= 2) levels.push_back(base.refined(f));
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = std::numeric_limits<double>::quiet_NaN();
    for (const auto& lv : levels) {
      try {
        out[static_cast<Eigen::Index>(i)] = lv.evaluate(points[i]);
        break;
      } catch (const std::domain_error&) {
      }
    }
  }
  return out;
}

struct ModeSet {
  std::vector<const NPMode*> modes;
  std::vector<int> family_rank;  // 0-based position within the family
};

ModeSet select_modes(const NPSpectrum& spectrum, int J) {
  if (J < 1) throw std::invalid_argument("truncation J must be >= 1");
  ModeSet set;
  for (Family f : {Family::plus, Family::minus, Family::zero}) {
    const auto fam = spectrum.family(f);
    if (fam.empty()) continue;
    if (static_cast<int>(fam.size()) < J)
      throw std::invalid_argument("spectrum has fewer than J modes in family " + to_string(f));
    for (int j = 0; j < J; ++j) {
      set.modes.push_back(fam[j]);
      set.family_rank.push_back(j);
    }
  }
  return set;
}

// Projection coefficients -(v | g_j) and the pieces shared by both routes.
struct Projection {
  TransmissionSolution sol;
  LimitSolution limit;
  Eigen::VectorXd a;
  std::vector<Eigen::VectorXd> outer;  // traces of the mode fields on dOmega
  double v_energy = 0.0;
};

Projection project_solution(const TransmissionSolver& solver, const NeumannData& f, double k,
                            const std::vector<const NPMode*>& modes) {
  const LayerOperators& ops = solver.operators();
  const Eigen::VectorXd& w = ops.weights();
  Projection p{solver.solve(f, k), solver.solve_limit_dirichlet(f), {}, {}, 0.0};
  p.a.resize(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t j = 0; j < modes.size(); ++j) {
    p.a[static_cast<Eigen::Index>(j)] = -weighted_dot(p.sol.inclusion_trace, modes[j]->density, w);
    p.outer.push_back(ops.outer_trace() * modes[j]->density);
  }
  const Eigen::VectorXd psi = p.sol.density - p.limit.exterior_flux;
  p.v_energy = -weighted_dot(psi, ops.single_layer().matrix * psi, w);
  return p;
}

double reconstruction_distance(const Projection& p, const Eigen::VectorXd& a,
                               const std::vector<Eigen::VectorXd>& outer,
                               const std::vector<bool>& use) {
  BoundaryTrace recon = p.limit.trace;
  for (std::size_t j = 0; j < outer.size(); ++j)
    if (use[j]) recon.values += a[static_cast<Eigen::Index>(j)] * outer[j];
  return trace_distance(recon, p.sol.trace);
}

}  // namespace

// ---------------------------------------------------------------------------
// Data

std::vector<FourierTerm> parse_fourier(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  std::vector<FourierTerm> out;
  std::set<std::pair<bool, int>> seen;
  while (is >> tok) {
    const auto colon = tok.find(':');
    if (tok.size() < 4 || (tok[0] != 'c' && tok[0] != 's') || colon == std::string::npos)
      throw std::invalid_argument("bad Fourier term '" + tok + "'");
    FourierTerm t;
    t.sine = tok[0] == 's';
    t.m = parse_integer(tok.substr(1, colon - 1));
    t.coeff = parse_number(tok.substr(colon + 1));
    if (t.m < 0 || (t.sine && t.m == 0))
      throw std::invalid_argument("bad Fourier index in '" + tok + "'");
    if (!seen.insert({t.sine, t.m}).second)
      throw std::invalid_argument("repeated Fourier term '" + tok + "'");
    out.push_back(t);
  }
  if (out.empty()) throw std::invalid_argument("empty Fourier description");
  return out;
}

std::string format_fourier(const std::vector<FourierTerm>& terms) {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += ' ';
    out += (t.sine ? 's' : 'c') + std::to_string(t.m) + ':' + format_number(t.coeff);
  }
  return out;
}

NeumannData::NeumannData(const BoundaryCurve& outer, Eigen::VectorXd values)
    : values_(std::move(values)), weights_(outer.weights()) {
  if (values_.size() != weights_.size())
    throw std::invalid_argument("Neumann data size differs from the outer node count");
  if (!values_.allFinite()) throw std::invalid_argument("Neumann data must be finite");
  mean_ = npeit::weighted_mean(values_, weights_);
}

NeumannData NeumannData::fourier(const BoundaryCurve& outer, std::vector<FourierTerm> terms) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(outer.size());
  for (int i = 0; i < outer.size(); ++i) {
    const double t = outer.parameter(i);
    for (const auto& term : terms)
      v[i] += term.coeff * (term.sine ? std::sin(term.m * t) : std::cos(term.m * t));
  }
  NeumannData d(outer, std::move(v));
  d.terms_ = std::move(terms);
  return d;
}

Eigen::VectorXd NeumannData::mean_free() const {
  Eigen::VectorXd v = values_;
  v.array() -= mean_;
  return v;
}

double NeumannData::l2_norm() const {
  return std::sqrt(weights_.dot(values_.cwiseAbs2()));
}

double trace_distance(const BoundaryTrace& a, const BoundaryTrace& b) {
  if (!(a.shape == b.shape) || a.values.size() != b.values.size() ||
      a.weights.size() != a.values.size() || b.weights.size() != b.values.size())
    throw std::invalid_argument("traces live on different node sets");
  const Eigen::VectorXd d = remove_mean(a.values, a.weights) - remove_mean(b.values, b.weights);
  return std::sqrt(a.weights.dot(d.cwiseAbs2()));
}

// ---------------------------------------------------------------------------
// Solver

TransmissionSolver::TransmissionSolver(std::shared_ptr<const LayerOperators> ops)
    : ops_(std::move(ops)), outer_(std::make_shared<FreeSpaceLayer>(ops_->scene().outer())) {
  const BoundaryCurve& c = ops_->curve();
  h_value_ = outer_->potential_matrix(c.nodes());
  Eigen::MatrixXd gx, gy;
  outer_->gradient_matrices(c.nodes(), gx, gy);
  h_flux_.resize(gx.rows(), gx.cols());
  for (int i = 0; i < c.size(); ++i)
    h_flux_.row(i) = c.normals()[i].x() * gx.row(i) + c.normals()[i].y() * gy.row(i);
  const Eigen::VectorXd sw = ops_->weights().cwiseSqrt();
  const Eigen::MatrixXd& b = ops_->mean_free_basis();
  kr_ = b.transpose() *
        (sw.asDiagonal() * ops_->np_adjoint().matrix * sw.cwiseInverse().asDiagonal()) * b;
}

BoundaryTrace TransmissionSolver::make_trace(Eigen::VectorXd values) const {
  const BoundaryCurve& outer = scene().outer();
  return BoundaryTrace{outer.shape(), outer.weights(), std::move(values)};
}

Eigen::VectorXd TransmissionSolver::solve_np(double lambda, const Eigen::VectorXd& rhs) const {
  const Eigen::VectorXd sw = ops_->weights().cwiseSqrt();
  const Eigen::MatrixXd& b = ops_->mean_free_basis();
  const Eigen::MatrixXd a =
      lambda * Eigen::MatrixXd::Identity(kr_.rows(), kr_.cols()) - kr_;
  const Eigen::VectorXd c = a.partialPivLu().solve(b.transpose() * sw.cwiseProduct(rhs));
  return sw.cwiseInverse().cwiseProduct(b * c);
}

BackgroundField TransmissionSolver::background(const NeumannData& f) const {
  const double k0 = scene().k0();
  const Eigen::VectorXd& wo = scene().outer().weights();
  BackgroundField h;
  h.sigma = outer_->solve_interior_neumann(f.mean_free() / k0).col(0);
  const Eigen::VectorXd tr = outer_->single_layer() * h.sigma;
  h.offset = -weighted_mean(tr, wo);
  h.outer_trace = tr.array() + h.offset;
  h.inclusion_trace = (h_value_ * h.sigma).array() + h.offset;
  h.inclusion_flux = h_flux_ * h.sigma;
  return h;
}

Eigen::VectorXd TransmissionSolver::background_values(const BackgroundField& h,
                                                      const std::vector<Point>& points) const {
  return (outer_->potential_matrix(points) * h.sigma).array() + h.offset;
}

TransmissionSolution TransmissionSolver::solve(const NeumannData& f, double k) const {
  const double k0 = scene().k0();
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("k must be positive");
  if (k == k0) throw std::invalid_argument("k must differ from k0");
  const LayerOperators& ops = *ops_;
  const Eigen::VectorXd& wo = scene().outer().weights();

  TransmissionSolution sol;
  sol.k = k;
  sol.k0 = k0;
  sol.lambda = (k + k0) / (2.0 * (k - k0));
  sol.subtracted_mean = f.weighted_mean();
  if (std::abs(sol.lambda) - 0.5 <= kResonanceMargin)
    sol.warnings.push_back("contrast parameter within " + format_number(kResonanceMargin) +
                           " of the NP spectrum bound; expect ill-conditioning");
  sol.background = background(f);
  sol.density = solve_np(sol.lambda, sol.background.inclusion_flux);
  if (!sol.density.allFinite()) throw SolverError("transmission solve produced non-finite density");

  const Eigen::VectorXd outer = sol.background.outer_trace + ops.outer_trace() * sol.density;
  const double shift = weighted_mean(outer, wo);
  sol.trace = make_trace(outer.array() - shift);
  sol.inclusion_trace =
      (sol.background.inclusion_trace + ops.single_layer().matrix * sol.density).array() - shift;
  sol.inclusion_flux =
      sol.background.inclusion_flux + ops.side_flux(sol.density, Side::interior);
  sol.variational_residual = variational_residual(sol, f);
  return sol;
}

double TransmissionSolver::variational_residual(const TransmissionSolution& sol,
                                                const NeumannData& f) const {
  const LayerOperators& ops = *ops_;
  const Eigen::VectorXd& w = ops.weights();
  const Eigen::VectorXd& wo = scene().outer().weights();
  const Eigen::VectorXd fm = f.mean_free();
  double worst = 0.0;
  const double un = std::sqrt(weighted_dot(sol.inclusion_trace, sol.inclusion_trace, w));
  const double fn = std::sqrt(weighted_dot(fm, fm, wo));
  auto norm = [](const Eigen::VectorXd& v, const Eigen::VectorXd& wt) {
    return std::sqrt(weighted_dot(v, v, wt));
  };
  for (const auto& h : probe_densities(ops.curve())) {
    const Eigen::VectorXd hin = ops.side_flux(h, Side::interior);
    const Eigen::VectorXd hout = ops.side_flux(h, Side::exterior);
    const Eigen::VectorXd th = ops.outer_trace() * h;
    const double a = sol.k * weighted_dot(sol.inclusion_trace, hin, w);
    const double b = sol.k0 * weighted_dot(sol.inclusion_trace, hout, w);
    const double r = weighted_dot(fm, th, wo);
    // Cauchy-Schwarz scale of the three pairings.
    const double scale =
        std::max(sol.k * un * norm(hin, w) + sol.k0 * un * norm(hout, w) + fn * norm(th, wo), 1e-300);
    worst = std::max(worst, std::abs(a - b - r) / scale);
  }
  return worst;
}

LimitSolution TransmissionSolver::solve_limit(const NeumannData& f, bool conductor) const {
  const LayerOperators& ops = *ops_;
  const int n = ops.size();
  const double k0 = scene().k0();
  const Eigen::VectorXd& w = ops.weights();
  const Eigen::VectorXd& wo = scene().outer().weights();

  LimitSolution lim;
  lim.conductor = conductor;
  lim.background = background(f);

  // [S 1; w^T 0] [psi; c] = [-H; net flux], so H + S psi + c = 0 on dD.
  Eigen::MatrixXd a(n + 1, n + 1);
  a.topLeftCorner(n, n) = ops.single_layer().matrix;
  a.topRightCorner(n, 1).setOnes();
  a.bottomLeftCorner(1, n) = w.transpose();
  a(n, n) = 0.0;
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = -lim.background.inclusion_trace;
  rhs[n] = conductor ? 0.0 : wo.dot(f.values()) / k0;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (!(lu.rcond() > kMinRcond)) {
    std::ostringstream os;
    os << "first-kind limit system is ill-conditioned (rcond " << format_number(lu.rcond())
       << "); try N = " << 2 * n;
    throw ResolutionError(os.str());
  }
  Eigen::VectorXd x = lu.solve(rhs);
  const double rscale = std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);
  if (!x.allFinite() || (a * x - rhs).cwiseAbs().maxCoeff() > 1e-10 * rscale) {
    const double eps = kTikhonovScale * a.cwiseAbs().rowwise().sum().maxCoeff();
    x = (a + eps * Eigen::MatrixXd::Identity(n + 1, n + 1)).partialPivLu().solve(rhs);
    lim.regularized = true;
  }
  lim.density = x.head(n);
  const double c = x[n];
  // Dirichlet: u0 = H + S psi + c vanishes on dD. Conductor: u = H + S psi equals -c there.
  lim.constant = conductor ? 0.0 : c;
  const double on_inclusion = conductor ? -c : 0.0;
  lim.inclusion_value = on_inclusion;
  const Eigen::VectorXd incl =
      lim.background.inclusion_trace + ops.single_layer().matrix * lim.density;
  const double hscale = std::max(lim.background.inclusion_trace.cwiseAbs().maxCoeff(), 1e-300);
  lim.boundary_residual =
      ((incl.array() + lim.constant) - on_inclusion).abs().maxCoeff() / hscale;

  const Eigen::VectorXd outer =
      (lim.background.outer_trace + ops.outer_trace() * lim.density).array() + lim.constant;
  lim.trace0 = make_trace(outer);
  lim.boundary_mean = weighted_mean(outer, wo);
  lim.trace = make_trace(outer.array() - lim.boundary_mean);
  lim.exterior_flux = lim.background.inclusion_flux + ops.side_flux(lim.density, Side::exterior);
  const Eigen::VectorXd data = conductor ? Eigen::VectorXd(f.mean_free() / k0)
                                         : Eigen::VectorXd(f.values() / k0);
  lim.energy = weighted_dot(outer, data, wo) -
               on_inclusion * w.dot(lim.exterior_flux);
  if (!lim.density.allFinite()) throw SolverError("limit solve produced non-finite density");
  return lim;
}

LimitSolution TransmissionSolver::solve_limit_dirichlet(const NeumannData& f) const {
  return solve_limit(f, false);
}

LimitSolution TransmissionSolver::solve_limit_conductor(const NeumannData& f) const {
  return solve_limit(f, true);
}

std::vector<DerivativeField> TransmissionSolver::k_derivatives(const NeumannData& f, double k,
                                                               int j_max) const {
  if (j_max < 0 || j_max > 12) throw std::invalid_argument("derivative order must be in [0, 12]");
  const LayerOperators& ops = *ops_;
  const Eigen::VectorXd& w = ops.weights();
  const Eigen::VectorXd& wo = scene().outer().weights();
  const double k0 = scene().k0();
  const TransmissionSolution sol = solve(f, k);

  std::vector<DerivativeField> out;
  DerivativeField d0;
  d0.order = 0;
  d0.density = sol.density;
  d0.inclusion_trace = sol.inclusion_trace;
  d0.inclusion_flux = sol.inclusion_flux;
  d0.trace = sol.trace;
  d0.v_norm = std::sqrt(std::abs(weighted_dot(sol.trace.values, f.mean_free() / k0, wo) -
                                 weighted_dot(sol.inclusion_trace, sol.density, w)));
  d0.variational_residual = sol.variational_residual;
  out.push_back(std::move(d0));

  const auto probes = probe_densities(ops.curve());
  for (int j = 1; j <= j_max; ++j) {
    const DerivativeField& prev = out.back();
    DerivativeField d;
    d.order = j;
    d.density = solve_np(sol.lambda, (j / (k - k0)) * prev.inclusion_flux);
    d.inclusion_trace = ops.single_layer().matrix * d.density;
    d.inclusion_flux = ops.side_flux(d.density, Side::interior);
    const Eigen::VectorXd outer = ops.outer_trace() * d.density;
    d.trace = make_trace(remove_mean(outer, wo));
    d.v_norm = std::sqrt(std::abs(weighted_dot(d.density, d.inclusion_trace, w)));
    const double un = std::sqrt(weighted_dot(d.inclusion_trace, d.inclusion_trace, w));
    const double pn = std::sqrt(weighted_dot(prev.inclusion_trace, prev.inclusion_trace, w));
    for (const auto& h : probes) {
      const Eigen::VectorXd hin = ops.side_flux(h, Side::interior);
      const Eigen::VectorXd hout = ops.side_flux(h, Side::exterior);
      const double a = k * weighted_dot(d.inclusion_trace, hin, w);
      const double b = k0 * weighted_dot(d.inclusion_trace, hout, w);
      const double c = j * weighted_dot(prev.inclusion_trace, hin, w);
      const double nin = std::sqrt(weighted_dot(hin, hin, w));
      const double nout = std::sqrt(weighted_dot(hout, hout, w));
      const double scale = std::max(k * un * nin + k0 * un * nout + j * pn * nin, 1e-300);
      d.variational_residual = std::max(d.variational_residual, std::abs(a - b + c) / scale);
    }
    out.push_back(std::move(d));
  }
  return out;
}

double TransmissionSolver::trace_constant() const {
  if (trace_constant_) return *trace_constant_;
  const LayerOperators& ops = *ops_;
  const BoundaryCurve& outer = scene().outer();
  const Eigen::VectorXd swo = outer.weights().cwiseSqrt();
  const Eigen::MatrixXd bo = householder_complement(swo);
  const Eigen::MatrixXd data = swo.cwiseInverse().asDiagonal() * bo;

  // Insulated inclusion: the transmission equation at k = 0.
  const Eigen::MatrixXd sigma = outer_->solve_interior_neumann(data);
  const Eigen::MatrixXd flux = h_flux_ * sigma;
  const Eigen::VectorXd sw = ops.weights().cwiseSqrt();
  const Eigen::MatrixXd& b = ops.mean_free_basis();
  const Eigen::MatrixXd a = -0.5 * Eigen::MatrixXd::Identity(kr_.rows(), kr_.cols()) - kr_;
  const Eigen::MatrixXd c = a.partialPivLu().solve(b.transpose() * sw.asDiagonal() * flux);
  const Eigen::MatrixXd phi = sw.cwiseInverse().asDiagonal() * (b * c);
  const Eigen::MatrixXd trace = outer_->single_layer() * sigma + ops.outer_trace() * phi;
  Eigen::MatrixXd t = bo.transpose() * swo.asDiagonal() * trace;
  t = 0.5 * (t + t.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("trace constant eigensolve failed");
  trace_constant_ = std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
  return *trace_constant_;
}

GradientBoundReport TransmissionSolver::gradient_bound_check(const TransmissionSolution& sol,
                                                             const LimitSolution& limit,
                                                             const NeumannData& f) const {
  const LayerOperators& ops = *ops_;
  GradientBoundReport rep;
  rep.k = sol.k;
  rep.grad_v_boundary =
      std::sqrt(std::abs(weighted_dot(sol.inclusion_trace, sol.inclusion_flux, ops.weights())));

  const AreaQuadrature quad = AreaQuadrature::inside(ops.curve().shape(), ops.size());
  const PotentialField base(ops_, sol.density);
  const PotentialField field = base.refined(refinement_for(base, quad));
  Eigen::MatrixXd hx, hy;
  outer_->gradient_matrices(quad.nodes(), hx, hy);
  const Eigen::VectorXd gsx = hx * sol.background.sigma;
  const Eigen::VectorXd gsy = hy * sol.background.sigma;
  rep.grad_v_inclusion = std::sqrt(quad.gradient_energy(
      [&](const std::vector<Point>& x, Eigen::VectorXd& gx, Eigen::VectorXd& gy) {
        field.gradient(x, gx, gy);
        gx += gsx;
        gy += gsy;
      }));

  rep.limit_energy = std::sqrt(std::max(limit.energy, 0.0));
  rep.trace_constant = trace_constant();
  rep.f_norm = f.l2_norm();
  rep.M = rep.limit_energy + rep.trace_constant * rep.f_norm / scene().k0();
  rep.ratio = rep.M > 0.0 ? rep.grad_v_inclusion * std::sqrt(sol.k) / rep.M : 0.0;
  return rep;
}

Eigen::VectorXd TransmissionSolver::evaluate(const LimitSolution& limit,
                                             const std::vector<Point>& points) const {
  const BoundaryCurve& incl = ops_->curve();
  const Eigen::VectorXd h = background_values(limit.background, points);
  const Eigen::VectorXd s = layer_values(PotentialField(ops_, limit.density), points);
  Eigen::VectorXd out(h.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    bool inside;
    try {
      inside = contains(incl, points[static_cast<std::size_t>(i)]);
    } catch (const IndeterminateLocation&) {
      inside = true;
    }
    out[i] = inside ? limit.inclusion_value : h[i] + s[i] + limit.constant;
  }
  return out;
}

Eigen::VectorXd TransmissionSolver::evaluate(const TransmissionSolution& sol,
                                             const std::vector<Point>& points) const {
  const Eigen::VectorXd& wo = scene().outer().weights();
  const Eigen::VectorXd raw =
      sol.background.outer_trace + ops_->outer_trace() * sol.density;
  const double shift = weighted_mean(raw, wo);
  return background_values(sol.background, points) +
         layer_values(PotentialField(ops_, sol.density), points) -
         Eigen::VectorXd::Constant(static_cast<Eigen::Index>(points.size()), shift);
}

// ---------------------------------------------------------------------------
// Free functions

namespace {
TransmissionSolver solver_for(const InclusionScene& scene) {
  return TransmissionSolver(assemble_layer_operators(scene));
}
}  // namespace

TransmissionSolution solve_transmission(const InclusionScene& scene, const NeumannData& f,
                                        double k) {
  return solver_for(scene).solve(f, k);
}

LimitSolution solve_limit_dirichlet(const InclusionScene& scene, const NeumannData& f) {
  return solver_for(scene).solve_limit_dirichlet(f);
}

LimitSolution solve_limit_conductor(const InclusionScene& scene, const NeumannData& f) {
  return solver_for(scene).solve_limit_conductor(f);
}

ExpansionCoefficients expansion_coefficients(const TransmissionSolver& solver,
                                             const NeumannData& f, double k,
                                             const NPSpectrum& spectrum, int J) {
  const LayerOperators& ops = solver.operators();
  const Eigen::VectorXd& w = ops.weights();
  const Eigen::VectorXd& wo = solver.scene().outer().weights();
  const double k0 = solver.scene().k0();
  const ModeSet set = select_modes(spectrum, J);
  const auto n = static_cast<Eigen::Index>(set.modes.size());
  const Projection p = project_solution(solver, f, k, set.modes);

  ExpansionCoefficients ex;
  ex.k = k;
  ex.J = J;
  ex.gram.resize(n, n);
  Eigen::VectorXd bvec(n);
  std::vector<Eigen::VectorXd> sg;
  for (const auto* md : set.modes) sg.push_back(ops.single_layer().matrix * md->density);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::VectorXd& g = set.modes[static_cast<std::size_t>(j)]->density;
    const Eigen::VectorXd fin = ops.side_flux(g, Side::interior);
    for (Eigen::Index i = 0; i < n; ++i)
      ex.gram(i, j) = weighted_dot(sg[static_cast<std::size_t>(i)], fin, w);
    // (f/k0 | phi_j) on dOmega minus the exterior pairing with the limit field,
    // which is constant -m on dD.
    bvec[j] = weighted_dot(f.values() / k0, p.outer[static_cast<std::size_t>(j)], wo) -
              p.limit.boundary_mean * w.dot(ops.side_flux(g, Side::exterior));
  }
  const Eigen::MatrixXd sys =
      (k - k0) * ex.gram.transpose() + k0 * Eigen::MatrixXd::Identity(n, n);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
  if (!(lu.rcond() > kMinRcond)) {
    double nearest = 0.0, best = std::numeric_limits<double>::infinity();
    for (const auto* md : set.modes) {
      const double dist = std::abs(md->mu - p.sol.lambda);
      if (dist < best) best = dist, nearest = md->lambda;
    }
    throw SolverError("truncated coefficient system is singular; nearest NP resonance lambda = " +
                      format_number(nearest));
  }
  const Eigen::VectorXd asys = lu.solve(k0 * bvec);
  ex.system_residual =
      (sys * asys - k0 * bvec).cwiseAbs().maxCoeff() / std::max(k0 * bvec.cwiseAbs().maxCoeff(), 1e-300);

  for (Eigen::Index j = 0; j < n; ++j) {
    const NPMode* md = set.modes[static_cast<std::size_t>(j)];
    ExpansionEntry e;
    e.family = md->family;
    e.index = md->index;
    e.lambda = md->lambda;
    e.A_system = asys[j];
    e.A_projection = p.a[j];
    e.B = bvec[j];
    e.gap = std::abs(e.A_system - e.A_projection);
    ex.max_gap = std::max(ex.max_gap, e.gap);
    ex.entries.push_back(e);
  }
  ex.parseval_sum = p.a.squaredNorm();
  ex.v_energy = p.v_energy;
  ex.reconstruction_error =
      reconstruction_distance(p, p.a, p.outer, std::vector<bool>(set.modes.size(), true));
  return ex;
}

std::vector<ReconstructionPoint> reconstruction_curve(const TransmissionSolver& solver,
                                                      const NeumannData& f, double k,
                                                      const NPSpectrum& spectrum, int J_max) {
  const ModeSet set = select_modes(spectrum, J_max);
  const Projection p = project_solution(solver, f, k, set.modes);
  std::vector<ReconstructionPoint> out;
  for (int J = 1; J <= J_max; ++J) {
    std::vector<bool> use(set.modes.size());
    ReconstructionPoint pt;
    pt.J = J;
    for (std::size_t j = 0; j < use.size(); ++j) {
      use[j] = set.family_rank[j] < J;
      if (use[j]) pt.parseval += p.a[static_cast<Eigen::Index>(j)] * p.a[static_cast<Eigen::Index>(j)];
    }
    pt.error = reconstruction_distance(p, p.a, p.outer, use);
    out.push_back(pt);
  }
  return out;
}

Eigen::VectorXd coefficient_derivatives(const TransmissionSolver& solver, const NeumannData& f,
                                        double k, const NPSpectrum& spectrum, int J) {
  const LayerOperators& ops = solver.operators();
  const Eigen::VectorXd& w = ops.weights();
  const double k0 = solver.scene().k0();
  const ModeSet set = select_modes(spectrum, J);
  const auto d = solver.k_derivatives(f, k, 1);
  Eigen::VectorXd out(static_cast<Eigen::Index>(set.modes.size()));
  for (std::size_t j = 0; j < set.modes.size(); ++j) {
    const Eigen::VectorXd fin = ops.side_flux(set.modes[j]->density, Side::interior);
    out[static_cast<Eigen::Index>(j)] =
        (-(k - k0) * weighted_dot(d[1].inclusion_trace, fin, w) -
         weighted_dot(d[0].inclusion_trace, fin, w)) /
        k0;
  }
  return out;
}

BoundaryMeanReport boundary_mean_check(const TransmissionSolver& a, const TransmissionSolver& b,
                                      const NeumannData& f) {
  if (!(a.scene().outer().shape() == b.scene().outer().shape()) ||
      a.scene().outer().size() != b.scene().outer().size())
    throw std::invalid_argument("both scenes must share the outer boundary");
  const LimitSolution la = a.solve_limit_dirichlet(f);
  const LimitSolution lb = b.solve_limit_dirichlet(f);
  BoundaryMeanReport rep;
  rep.m1 = la.boundary_mean;
  rep.m2 = lb.boundary_mean;

  // On its own boundary each normalized limit equals minus its mean.
  auto sweep = [&](const TransmissionSolver& self, double m_self, const TransmissionSolver& other,
                   const LimitSolution& l_other, double m_other) {
    const BoundaryCurve& own = self.operators().curve();
    const BoundaryCurve& oc = other.operators().curve();
    std::vector<Point> pts;
    for (const auto& x : own.nodes()) {
      bool inside = false;
      try {
        inside = contains(oc, x);
      } catch (const IndeterminateLocation&) {
        ++rep.shared_points;
        rep.sup_difference = std::max(rep.sup_difference, std::abs(m_other - m_self));
        continue;
      }
      if (!inside) pts.push_back(x);
    }
    if (pts.empty()) return;
    const Eigen::VectorXd v = other.evaluate(l_other, pts);
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (std::isfinite(v[i]))
        rep.sup_difference = std::max(rep.sup_difference, std::abs(-m_self - (v[i] - m_other)));
  };
  sweep(a, rep.m1, b, lb, rep.m2);
  sweep(b, rep.m2, a, la, rep.m1);
  rep.holds = std::abs(rep.m1 - rep.m2) <= rep.sup_difference + 1e-12;
  return rep;
}

}  // namespace npeit
