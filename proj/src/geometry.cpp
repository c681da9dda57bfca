#include "npeit/geometry.hpp"

#include "npeit/numeric_format.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

namespace npeit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Distances below this many node spacings cannot be classified.
constexpr double kIndeterminateFactor = 1e-8;

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

double star_radius(const CurveShape& s, double t, int order) {
  double r = order == 0 ? s.a : 0.0;
  for (const auto& md : s.modes) {
    const double m = md.m;
    switch (order) {
      case 0: r += md.amplitude * std::cos(m * t); break;
      case 1: r -= md.amplitude * m * std::sin(m * t); break;
      default: r -= md.amplitude * m * m * std::cos(m * t); break;
    }
  }
  return r;
}

void validate_shape(const CurveShape& s) {
  if (!std::isfinite(s.center.x()) || !std::isfinite(s.center.y()))
    throw GeometryError("curve center must be finite");
  switch (s.kind) {
    case CurveKind::circle:
      if (!(s.a > 0.0)) throw GeometryError("circle radius must be positive");
      break;
    case CurveKind::ellipse:
      if (!(s.a > 0.0) || !(s.b > 0.0))
        throw GeometryError("ellipse semi-axes must be positive");
      break;
    case CurveKind::star: {
      if (!(s.a > 0.0)) throw GeometryError("star base radius must be positive");
      for (const auto& md : s.modes)
        if (md.m < 1) throw GeometryError("star mode index must be >= 1");
      // A polar graph is simple iff r(t) > 0 everywhere.
      const int samples = 4096;
      for (int i = 0; i < samples; ++i) {
        const double r = star_radius(s, kTwoPi * i / samples, 0);
        if (!(r > 0.0))
          throw GeometryError("star coefficients give r(t) <= 0: curve is not simple");
      }
      break;
    }
  }
}

struct Location {
  CurveProjection nearest;
  bool inside = false;
  bool indeterminate = false;
};

int winding_number(const std::vector<Point>& nodes, const Point& x) {
  double total = 0.0;
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point u = nodes[i] - x;
    const Point v = nodes[(i + 1) % n] - x;
    total += std::atan2(u.x() * v.y() - u.y() * v.x(), u.dot(v));
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

Location locate(const BoundaryCurve& curve, const Point& x) {
  Location loc;
  loc.nearest = project(curve, x);
  const double h = curve.spacing();
  if (loc.nearest.distance <= kIndeterminateFactor * h) {
    loc.indeterminate = true;
    return loc;
  }
  if (loc.nearest.distance < 2.0 * h) {
    const Point d = curve.shape().derivative(loc.nearest.t);
    const Point nu(d.y(), -d.x());
    loc.inside = (x - loc.nearest.point).dot(nu) < 0.0;
  } else {
    loc.inside = winding_number(curve.nodes(), x) == 1;
  }
  return loc;
}

std::vector<const BoundaryCurve*> boundary_curves(const Region& r) {
  std::vector<const BoundaryCurve*> out{&r.outer()};
  for (const auto& h : r.holes()) out.push_back(&h);
  return out;
}

// Maximise f over [lo, hi] by Brent iteration on -f.
template <class F>
std::pair<double, double> maximise_1d(F f, double lo, double hi) {
  auto r = boost::math::tools::brent_find_minima([&](double t) { return -f(t); }, lo, hi,
                                                 std::numeric_limits<double>::digits / 2 + 4);
  return {r.first, -r.second};
}

// sup over the boundary curves of `a` of dist(., b), with local 1-D refinement.
double boundary_sup(const Region& a, const Region& b) {
  double best = 0.0;
  for (const BoundaryCurve* c : boundary_curves(a)) {
    const int n = c->size();
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = b.distance(c->nodes()[i]);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    const int keep = std::min(n, 6);
    std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                      [&](int i, int j) { return d[i] > d[j] || (d[i] == d[j] && i < j); });
    best = std::max(best, d[order[0]]);
    const double dt = kTwoPi / n;
    for (int k = 0; k < keep; ++k) {
      const int i = order[k];
      if (d[i] <= 0.0) continue;
      const double t0 = c->parameter(i);
      auto [t, v] = maximise_1d([&](double t) { return b.distance(c->shape().position(t)); },
                                t0 - dt, t0 + dt);
      (void)t;
      best = std::max(best, v);
    }
  }
  return best;
}

// sup over the closed region `a` of dist(., b).
double region_sup(const Region& a, const Region& b) {
  double best = boundary_sup(a, b);

  const auto& outer_nodes = a.outer().nodes();
  Point lo = outer_nodes.front(), hi = outer_nodes.front();
  for (const auto& p : outer_nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const int g = 48;
  const Point step = (hi - lo) / g;
  std::vector<std::pair<double, Point>> seeds;
  auto consider = [&](const Point& p) {
    if (a.distance(p) == 0.0) seeds.emplace_back(b.distance(p), p);
  };
  for (int i = 0; i <= g; ++i)
    for (int j = 0; j <= g; ++j) consider(lo + Point(i * step.x(), j * step.y()));
  for (const BoundaryCurve* c : boundary_curves(a)) consider(c->shape().center);
  for (const BoundaryCurve* c : boundary_curves(b)) consider(c->shape().center);
  if (seeds.empty()) return best;

  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  const std::size_t keep = std::min<std::size_t>(seeds.size(), 8);
  const double diam = (hi - lo).norm();
  const Point dirs[8] = {Point(1, 0),  Point(-1, 0), Point(0, 1),
                         Point(0, -1), Point(1, 1).normalized(), Point(-1, 1).normalized(),
                         Point(1, -1).normalized(), Point(-1, -1).normalized()};
  for (std::size_t s = 0; s < keep; ++s) {
    auto [fx, x] = seeds[s];
    double h = step.norm();
    for (int it = 0; it < 4000 && h > 1e-13 * diam; ++it) {
      bool moved = false;
      for (const auto& dvec : dirs) {
        const Point y = x + h * dvec;
        if (a.distance(y) != 0.0) continue;
        const double fy = b.distance(y);
        if (fy > fx) {
          fx = fy;
          x = y;
          moved = true;
          break;
        }
      }
      if (!moved) h *= 0.5;
    }
    best = std::max(best, fx);
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// numeric formatting

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || first == last)
    throw std::invalid_argument("not a number: '" + std::string(token) + "'");
  return v;
}

int parse_integer(std::string_view token) {
  int v = 0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || first == last)
    throw std::invalid_argument("not an integer: '" + std::string(token) + "'");
  return v;
}

// ---------------------------------------------------------------------------
// CurveShape

CurveShape CurveShape::circle(const Point& center, double radius) {
  CurveShape s;
  s.kind = CurveKind::circle;
  s.center = center;
  s.a = radius;
  s.b = radius;
  return s;
}

CurveShape CurveShape::ellipse(const Point& center, double a, double b) {
  CurveShape s;
  s.kind = CurveKind::ellipse;
  s.center = center;
  s.a = a;
  s.b = b;
  return s;
}

CurveShape CurveShape::star(const Point& center, double r0, std::vector<StarMode> modes) {
  CurveShape s;
  s.kind = CurveKind::star;
  s.center = center;
  s.a = r0;
  s.b = r0;
  s.modes = std::move(modes);
  return s;
}

Point CurveShape::position(double t) const {
  const Point e(std::cos(t), std::sin(t));
  switch (kind) {
    case CurveKind::circle: return center + a * e;
    case CurveKind::ellipse: return center + Point(a * e.x(), b * e.y());
    case CurveKind::star: return center + star_radius(*this, t, 0) * e;
  }
  return center;
}

Point CurveShape::derivative(double t) const {
  const Point e(std::cos(t), std::sin(t));
  const Point ep(-e.y(), e.x());
  switch (kind) {
    case CurveKind::circle: return a * ep;
    case CurveKind::ellipse: return Point(-a * e.y(), b * e.x());
    case CurveKind::star: return star_radius(*this, t, 1) * e + star_radius(*this, t, 0) * ep;
  }
  return Point::Zero();
}

Point CurveShape::second_derivative(double t) const {
  const Point e(std::cos(t), std::sin(t));
  const Point ep(-e.y(), e.x());
  switch (kind) {
    case CurveKind::circle: return -a * e;
    case CurveKind::ellipse: return Point(-a * e.x(), -b * e.y());
    case CurveKind::star: {
      const double r = star_radius(*this, t, 0);
      const double r1 = star_radius(*this, t, 1);
      const double r2 = star_radius(*this, t, 2);
      return (r2 - r) * e + 2.0 * r1 * ep;
    }
  }
  return Point::Zero();
}

CurveShape parse_curve(std::string_view text) {
  const auto tok = split_ws(text);
  if (tok.empty()) throw GeometryError("empty curve description");
  auto need = [&](std::size_t count) {
    if (tok.size() != count)
      throw GeometryError("curve '" + std::string(tok[0]) + "' expects " +
                          std::to_string(count - 1) + " parameters");
  };
  CurveShape s;
  try {
    if (tok[0] == "circle") {
      need(4);
      s = CurveShape::circle({parse_number(tok[1]), parse_number(tok[2])}, parse_number(tok[3]));
    } else if (tok[0] == "ellipse") {
      need(5);
      s = CurveShape::ellipse({parse_number(tok[1]), parse_number(tok[2])}, parse_number(tok[3]),
                              parse_number(tok[4]));
    } else if (tok[0] == "star") {
      if (tok.size() < 4) throw GeometryError("star expects cx cy r0 [m:amp]*");
      std::vector<StarMode> modes;
      for (std::size_t i = 4; i < tok.size(); ++i) {
        const auto colon = tok[i].find(':');
        if (colon == std::string_view::npos)
          throw GeometryError("star mode must read m:amp, got '" + std::string(tok[i]) + "'");
        modes.push_back({parse_integer(tok[i].substr(0, colon)),
                         parse_number(tok[i].substr(colon + 1))});
      }
      s = CurveShape::star({parse_number(tok[1]), parse_number(tok[2])}, parse_number(tok[3]),
                           std::move(modes));
    } else {
      throw GeometryError("unknown curve kind '" + std::string(tok[0]) + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw GeometryError(std::string("bad curve parameter: ") + e.what());
  }
  validate_shape(s);
  return s;
}

std::string format_curve(const CurveShape& s) {
  std::ostringstream os;
  switch (s.kind) {
    case CurveKind::circle:
      os << "circle " << format_number(s.center.x()) << ' ' << format_number(s.center.y()) << ' '
         << format_number(s.a);
      break;
    case CurveKind::ellipse:
      os << "ellipse " << format_number(s.center.x()) << ' ' << format_number(s.center.y())
         << ' ' << format_number(s.a) << ' ' << format_number(s.b);
      break;
    case CurveKind::star:
      os << "star " << format_number(s.center.x()) << ' ' << format_number(s.center.y()) << ' '
         << format_number(s.a);
      for (const auto& md : s.modes) os << ' ' << md.m << ':' << format_number(md.amplitude);
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// BoundaryCurve

BoundaryCurve::BoundaryCurve(CurveShape shape, int n) : shape_(std::move(shape)), n_(n) {
  if (n < 16 || n % 2 != 0) throw GeometryError("node count must be even and >= 16");
  validate_shape(shape_);
  nodes_.resize(n);
  normals_.resize(n);
  speed_.resize(n);
  curvature_.resize(n);
  weights_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = parameter(i);
    const Point d1 = shape_.derivative(t);
    const Point d2 = shape_.second_derivative(t);
    const double sp = d1.norm();
    if (!(sp > 0.0)) throw GeometryError("curve parameterization is degenerate");
    nodes_[i] = shape_.position(t);
    normals_[i] = Point(d1.y(), -d1.x()) / sp;
    speed_[i] = sp;
    curvature_[i] = (d1.x() * d2.y() - d1.y() * d2.x()) / (sp * sp * sp);
    weights_[i] = kTwoPi * sp / n;
  }
  for (int i = 0; i < n; ++i)
    spacing_ = std::max(spacing_, (nodes_[(i + 1) % n] - nodes_[i]).norm());
  if (!(signed_area() > 0.0)) throw GeometryError("curve must be positively oriented");
}

double BoundaryCurve::parameter(int i) const { return kTwoPi * i / n_; }

double BoundaryCurve::signed_area() const {
  // Trapezoid rule for (1/2) * integral of (x y' - y x') dt, spectrally accurate.
  double s = 0.0;
  for (int i = 0; i < n_; ++i) {
    const Point d = shape_.derivative(parameter(i));
    s += nodes_[i].x() * d.y() - nodes_[i].y() * d.x();
  }
  return 0.5 * s * kTwoPi / n_;
}

BoundaryCurve make_curve(const CurveShape& shape, int n) { return BoundaryCurve(shape, n); }

// ---------------------------------------------------------------------------
// point location

CurveProjection project(const BoundaryCurve& curve, const Point& x) {
  const int n = curve.size();
  const auto& nodes = curve.nodes();
  std::vector<double> d(n);
  double dmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    d[i] = (nodes[i] - x).norm();
    dmin = std::min(dmin, d[i]);
  }
  const CurveShape& s = curve.shape();
  const double dt = kTwoPi / n;
  CurveProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double dl = d[(i + n - 1) % n];
    const double dr = d[(i + 1) % n];
    if (d[i] > dl || d[i] > dr || d[i] > dmin + curve.spacing()) continue;
    const double t0 = curve.parameter(i);
    auto dist2 = [&](double t) { return (s.position(t) - x).squaredNorm(); };
    auto r = boost::math::tools::brent_find_minima(dist2, t0 - dt, t0 + dt,
                                                   std::numeric_limits<double>::digits / 2 + 4);
    double t = r.first;
    // Newton polish on (q(t) - x) . q'(t) = 0.
    for (int it = 0; it < 4; ++it) {
      const Point q = s.position(t) - x;
      const Point d1 = s.derivative(t);
      const double phi = q.dot(d1);
      const double dphi = d1.squaredNorm() + q.dot(s.second_derivative(t));
      if (!(dphi > 0.0)) break;
      const double tn = t - phi / dphi;
      if (std::abs(tn - t0) > dt || dist2(tn) > dist2(t)) break;
      t = tn;
    }
    const double dd = std::sqrt(dist2(t));
    if (dd < best.distance) best = {t, s.position(t), dd};
  }
  return best;
}

bool contains(const BoundaryCurve& curve, const Point& x) {
  const Location loc = locate(curve, x);
  if (loc.indeterminate)
    throw IndeterminateLocation("point lies on the discrete curve; location is indeterminate");
  return loc.inside;
}

// ---------------------------------------------------------------------------
// regions and distances

Region::Region(BoundaryCurve outer, std::vector<BoundaryCurve> holes)
    : outer_(std::move(outer)), holes_(std::move(holes)) {
  for (const auto& h : holes_)
    for (const auto& p : h.nodes())
      if (!contains(outer_, p)) throw GeometryError("region hole must lie inside the outer curve");
}

double Region::distance(const Point& x) const {
  const Location lo = locate(outer_, x);
  if (lo.indeterminate) return 0.0;
  if (!lo.inside) return lo.nearest.distance;
  for (const auto& h : holes_) {
    const Location lh = locate(h, x);
    if (lh.indeterminate) return 0.0;
    if (lh.inside) return lh.nearest.distance;
  }
  return 0.0;
}

double hausdorff_distance(const Region& a, const Region& b) {
  return std::max(region_sup(a, b), region_sup(b, a));
}

double modified_distance(const Region& a, const Region& b) {
  return std::max(boundary_sup(a, b), boundary_sup(b, a));
}

double hausdorff_distance(const BoundaryCurve& a, const BoundaryCurve& b) {
  return hausdorff_distance(Region(a), Region(b));
}

double modified_distance(const BoundaryCurve& a, const BoundaryCurve& b) {
  return modified_distance(Region(a), Region(b));
}

// ---------------------------------------------------------------------------
// scene

InclusionScene::InclusionScene(BoundaryCurve outer, BoundaryCurve inclusion, double k0)
    : outer_(std::move(outer)), inclusion_(std::move(inclusion)), k0_(k0) {
  if (!(k0 > 0.0) || !std::isfinite(k0)) throw GeometryError("k0 must be positive");
  separation_ = std::numeric_limits<double>::infinity();
  for (const auto& p : inclusion_.nodes()) {
    const Location loc = locate(outer_, p);
    if (loc.indeterminate || !loc.inside)
      throw GeometryError("inclusion must lie strictly inside the outer domain");
    separation_ = std::min(separation_, loc.nearest.distance);
  }
}

double conductivity_at(const InclusionScene& scene, double k, const Point& x) {
  if (!(k > 0.0)) throw std::invalid_argument("conductivity k must be positive");
  return contains(scene.inclusion(), x) ? k : scene.k0();
}

}  // namespace npeit
