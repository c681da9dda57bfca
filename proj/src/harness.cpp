#include "npeit/harness.hpp"

#include "npeit/disk_oracle.hpp"
#include "npeit/numeric_format.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

namespace npeit {

namespace {

constexpr double kIdenticalTraces = 1e-10;

NeumannData data_for(const ExperimentConfig& c, const BoundaryCurve& outer) {
  return NeumannData::fourier(outer, c.f);
}

TransmissionSolver solver_for(const InclusionScene& scene) {
  return TransmissionSolver(assemble_layer_operators(scene));
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t l = i; l <= j; ++l) r[idx[l]] = avg;
    i = j + 1;
  }
  return r;
}

bool circle_at_origin(const CurveShape& s) {
  return (s.kind == CurveKind::circle || (s.kind == CurveKind::ellipse && s.a == s.b)) &&
         s.center.isZero(0.0);
}

// cos/sin(m t) coefficient of a trace on the unit circle.
double fourier_coefficient(const BoundaryTrace& tr, const BoundaryCurve& outer, bool sine, int m) {
  double acc = 0.0;
  for (int i = 0; i < outer.size(); ++i) {
    const double t = outer.parameter(i);
    acc += tr.weights[i] * tr.values[i] * (sine ? std::sin(m * t) : std::cos(m * t));
  }
  return acc / std::numbers::pi;
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs >= 2 points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("rank correlation needs >= 2 points");
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------

SweepResult run_sweep(const ExperimentConfig& config, std::ostream& csv) {
  csv << "k,dist_dirichlet,dist_conductor,grad_ratio\n" << std::flush;
  const TransmissionSolver solver = solver_for(config.scene());
  const NeumannData f = data_for(config, solver.scene().outer());
  const LimitSolution dir = solver.solve_limit_dirichlet(f);
  const LimitSolution cond = solver.solve_limit_conductor(f);

  SweepResult r;
  for (double k : config.k_ladder()) {
    const TransmissionSolution sol = solver.solve(f, k);
    SweepRow row;
    row.k = k;
    row.dist_dirichlet = trace_distance(sol.trace, dir.trace);
    row.dist_conductor = trace_distance(sol.trace, cond.trace);
    row.grad_ratio = solver.gradient_bound_check(sol, dir, f).ratio;
    csv << format_number(row.k) << ',' << format_number(row.dist_dirichlet) << ','
        << format_number(row.dist_conductor) << ',' << format_number(row.grad_ratio) << '\n'
        << std::flush;
    r.rows.push_back(row);
  }

  r.dirichlet_decreasing = r.conductor_decreasing = true;
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    r.dirichlet_decreasing &= r.rows[i].dist_dirichlet < r.rows[i - 1].dist_dirichlet;
    r.conductor_decreasing &= r.rows[i].dist_conductor < r.rows[i - 1].dist_conductor;
  }
  for (const auto& row : r.rows) r.max_grad_ratio = std::max(r.max_grad_ratio, row.grad_ratio);
  r.final_over_initial = r.rows.back().dist_dirichlet / r.rows.front().dist_dirichlet;
  if (r.rows.size() >= 2) {
    const std::size_t first = r.rows.size() > 4 ? r.rows.size() - 4 : 0;
    std::vector<double> x, y;
    for (std::size_t i = first; i < r.rows.size(); ++i) {
      x.push_back(r.rows[i].k);
      y.push_back(r.rows[i].dist_dirichlet);
    }
    r.slope_points = static_cast<int>(x.size());
    if (std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; }))
      r.slope = loglog_slope(x, y);
  }
  return r;
}

void write_sweep_summary(std::ostream& os, const SweepResult& r) {
  os << "points,slope,slope_points,final_over_initial,dirichlet_decreasing,conductor_decreasing,"
        "max_grad_ratio\n"
     << r.rows.size() << ',' << (r.slope ? format_number(*r.slope) : "undefined") << ','
     << r.slope_points << ',' << format_number(r.final_over_initial) << ','
     << (r.dirichlet_decreasing ? 1 : 0) << ',' << (r.conductor_decreasing ? 1 : 0) << ','
     << format_number(r.max_grad_ratio) << '\n';
}

void assert_sweep(const ExperimentConfig& config, const SweepResult& r) {
  const NeumannData f = NeumannData::fourier(make_curve(config.outer, config.n_outer), config.f);
  const bool zero_mean = std::abs(f.weighted_mean()) <= 1e-12 * std::max(1.0, f.l2_norm());
  if (r.rows.size() >= 2 && !r.conductor_decreasing)
    throw AssertionFailure("distance to the conductor limit is not strictly decreasing");
  if (zero_mean && r.rows.size() >= 2 && !r.dirichlet_decreasing)
    throw AssertionFailure("distance to the Dirichlet limit is not strictly decreasing");
  if (zero_mean && r.max_grad_ratio > 1.0)
    throw AssertionFailure("gradient bound ratio exceeds 1: " + format_number(r.max_grad_ratio));
}

// ---------------------------------------------------------------------------

StabilityResult run_stability(const ExperimentConfig& config, std::ostream& csv) {
  csv << "pair_id,d_H,d_m,Lambda,ref_triple_log\n" << std::flush;
  StabilityResult r;
  const auto pairs = config.all_pairs();
  if (pairs.empty()) throw std::invalid_argument("no stability pairs configured");
  const auto ks = config.k_ladder();
  int id = 0;
  for (const auto& p : pairs) {
    ++id;
    const TransmissionSolver a = solver_for(config.scene_for(p.first));
    const TransmissionSolver b = solver_for(config.scene_for(p.second));
    const NeumannData f = data_for(config, a.scene().outer());
    StabilityRow row;
    row.pair_id = id;
    const BoundaryCurve& ca = a.operators().curve();
    const BoundaryCurve& cb = b.operators().curve();
    row.d_H = hausdorff_distance(ca, cb);
    row.d_m = modified_distance(ca, cb);
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& x : ca.nodes()) gap = std::min(gap, project(cb, x).distance);
    row.shares_boundary = gap <= 1e-8 * std::max(ca.spacing(), cb.spacing());
    if (!row.shares_boundary)
      r.warnings.push_back("pair " + std::to_string(id) + ": boundaries do not meet (gap " +
                           format_number(gap) + ")");
    for (double k : ks)
      row.Lambda = std::max(row.Lambda, trace_distance(a.solve(f, k).trace, b.solve(f, k).trace));
    if (row.Lambda > kIdenticalTraces && row.Lambda < std::exp(-std::numbers::e))
      row.ref_triple_log = 1.0 / std::log(std::log(std::abs(std::log(row.Lambda))));
    csv << row.pair_id << ',' << format_number(row.d_H) << ',' << format_number(row.d_m) << ','
        << format_number(row.Lambda) << ','
        << (row.ref_triple_log ? format_number(*row.ref_triple_log) : "undefined") << '\n'
        << std::flush;
    r.rows.push_back(row);
  }
  if (r.rows.size() >= 2) {
    std::vector<double> dh, lam;
    for (const auto& row : r.rows) {
      dh.push_back(row.d_H);
      lam.push_back(row.Lambda);
    }
    r.spearman = spearman(dh, lam);
  }
  return r;
}

void write_stability_summary(std::ostream& os, const StabilityResult& r) {
  os << "pairs,spearman,warnings\n"
     << r.rows.size() << ',' << (r.spearman ? format_number(*r.spearman) : "undefined") << ','
     << r.warnings.size() << '\n';
}

void assert_stability(const StabilityResult& r) {
  if (r.spearman && !(*r.spearman > 0.0))
    throw AssertionFailure("Lambda is not positively rank-correlated with d_H");
  for (const auto& row : r.rows)
    if (row.d_H == 0.0 && row.Lambda > kIdenticalTraces)
      throw AssertionFailure("identical inclusions with nonzero Lambda");
}

// ---------------------------------------------------------------------------

NPSpectrum run_spectrum(const ExperimentConfig& config, std::ostream& csv) {
  const NPSpectrum s = solve_spectrum(assemble_layer_operators(config.scene()), config.n_modes);
  write_spectrum_csv(csv, s);
  return s;
}

void assert_spectrum(const NPSpectrum& s) {
  for (const auto& md : s.modes()) {
    if (std::abs(md.mu) > 0.5 + 1e-9)
      throw AssertionFailure("NP eigenvalue outside [-1/2, 1/2]: " + format_number(md.mu));
    if (md.residual > 1e-8)
      throw AssertionFailure("NP eigenpair residual " + format_number(md.residual));
  }
}

// ---------------------------------------------------------------------------

ExpansionReport run_expansion(const ExperimentConfig& config, std::ostream& csv,
                              std::ostream& reconstruction_csv) {
  csv << "family,index,A_system,A_projection,gap\n" << std::flush;
  reconstruction_csv << "J,recon_error,parseval\n" << std::flush;
  const TransmissionSolver solver = solver_for(config.scene());
  const NeumannData f = data_for(config, solver.scene().outer());
  const NPSpectrum spectrum = solve_spectrum(solver.operators_ptr(), config.n_modes);
  ExpansionReport r;
  r.coefficients = expansion_coefficients(solver, f, config.expansion_k, spectrum, config.J);
  for (const auto& e : r.coefficients.entries)
    csv << to_string(e.family) << ',' << e.index << ',' << format_number(e.A_system) << ','
        << format_number(e.A_projection) << ',' << format_number(e.gap) << '\n';
  csv << std::flush;
  r.reconstruction =
      reconstruction_curve(solver, f, config.expansion_k, spectrum, config.reconstruction_J);
  for (const auto& p : r.reconstruction)
    reconstruction_csv << p.J << ',' << format_number(p.error) << ',' << format_number(p.parseval)
                       << '\n';
  return r;
}

void assert_expansion(const ExpansionReport& r) {
  if (r.coefficients.system_residual > 1e-10)
    throw AssertionFailure("coefficient system residual " +
                           format_number(r.coefficients.system_residual));
  for (std::size_t i = 1; i < r.reconstruction.size(); ++i)
    if (r.reconstruction[i].error > r.reconstruction[i - 1].error * (1 + 1e-9) + 1e-13)
      throw AssertionFailure("reconstruction error increases at J = " +
                             std::to_string(r.reconstruction[i].J));
}

// ---------------------------------------------------------------------------

std::vector<OracleRow> oracle_check(const ExperimentConfig& config, std::ostream& csv) {
  csv << "kind,mode,k,bem,oracle,abs_diff\n" << std::flush;
  if (!circle_at_origin(config.outer) || config.outer.a != 1.0 ||
      !circle_at_origin(config.inclusion))
    throw std::invalid_argument("oracle-check needs concentric circles with a unit outer disk");
  const double r0 = config.inclusion.a;
  const TransmissionSolver solver = solver_for(config.scene());
  const BoundaryCurve& outer = solver.scene().outer();
  const NeumannData f = data_for(config, outer);
  std::vector<OracleRow> rows;
  auto emit = [&](OracleRow row) {
    row.abs_diff = std::abs(row.bem - row.oracle);
    csv << row.kind << ',' << (row.sine ? 's' : 'c') << row.m << ',' << format_number(row.k) << ','
        << format_number(row.bem) << ',' << format_number(row.oracle) << ','
        << format_number(row.abs_diff) << '\n'
        << std::flush;
    rows.push_back(row);
  };
  for (double k : config.k_ladder()) {
    const TransmissionSolution sol = solver.solve(f, k);
    for (const auto& t : config.f) {
      if (t.m == 0) continue;
      emit({"transmission", t.sine, t.m, k, fourier_coefficient(sol.trace, outer, t.sine, t.m),
            oracle_transmission_mode(t.m, config.k0, k, r0, t.coeff).trace_coefficient(), 0.0});
    }
  }
  const LimitSolution lim = solver.solve_limit_dirichlet(f);
  for (const auto& t : config.f) {
    if (t.m == 0) continue;
    emit({"dirichlet_limit", t.sine, t.m, std::numeric_limits<double>::infinity(),
          fourier_coefficient(lim.trace, outer, t.sine, t.m),
          oracle_limit_mode(t.m, config.k0, r0, LimitKind::dirichlet_zero, t.coeff), 0.0});
  }
  return rows;
}

void assert_oracle(const std::vector<OracleRow>& rows) {
  for (const auto& r : rows)
    if (!(r.abs_diff <= kOracleTolerance))
      throw AssertionFailure(r.kind + " mode " + std::to_string(r.m) + " deviates by " +
                             format_number(r.abs_diff));
}

}  // namespace npeit
