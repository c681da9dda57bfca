#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace npeit {

using Point = Eigen::Vector2d;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a point lies too close to a discrete curve to be classified.
class IndeterminateLocation : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

enum class CurveKind { circle, ellipse, star };

struct StarMode {
  int m = 0;
  double amplitude = 0.0;
  bool operator==(const StarMode&) const = default;
};

/// Analytic description of a closed curve q(t), t in [0, 2pi).
///
/// circle:  q = c + a (cos t, sin t)
/// ellipse: q = c + (a cos t, b sin t)
/// star:    q = c + r(t) (cos t, sin t),  r(t) = a + sum amp_k cos(m_k t)
struct CurveShape {
  CurveKind kind = CurveKind::circle;
  Point center = Point::Zero();
  double a = 1.0;
  double b = 1.0;
  std::vector<StarMode> modes;

  static CurveShape circle(const Point& center, double radius);
  static CurveShape ellipse(const Point& center, double a, double b);
  static CurveShape star(const Point& center, double r0, std::vector<StarMode> modes);

  Point position(double t) const;
  Point derivative(double t) const;
  Point second_derivative(double t) const;

  bool operator==(const CurveShape&) const = default;
};

/// Parses `circle cx cy r`, `ellipse cx cy a b` or `star cx cy r0 [m:amp]*`.
CurveShape parse_curve(std::string_view text);
/// Inverse of parse_curve with round-trip decimal output.
std::string format_curve(const CurveShape& shape);

/// Equispaced Nystrom discretization of a smooth, positively oriented curve.
class BoundaryCurve {
 public:
  BoundaryCurve(CurveShape shape, int n);

  const CurveShape& shape() const { return shape_; }
  int size() const { return n_; }
  double parameter(int i) const;

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Point>& normals() const { return normals_; }
  const Eigen::VectorXd& speed() const { return speed_; }
  const Eigen::VectorXd& curvature() const { return curvature_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  double length() const { return weights_.sum(); }
  double signed_area() const;
  /// Largest distance between consecutive nodes.
  double spacing() const { return spacing_; }

 private:
  CurveShape shape_;
  int n_;
  std::vector<Point> nodes_;
  std::vector<Point> normals_;
  Eigen::VectorXd speed_;
  Eigen::VectorXd curvature_;
  Eigen::VectorXd weights_;
  double spacing_ = 0.0;
};

BoundaryCurve make_curve(const CurveShape& shape, int n);

struct CurveProjection {
  double t = 0.0;
  Point point = Point::Zero();
  double distance = 0.0;
};

/// Nearest point on the analytic curve, seeded by the discrete nodes.
CurveProjection project(const BoundaryCurve& curve, const Point& x);

/// True iff the winding number of the curve around x is one.
/// Throws IndeterminateLocation within 1e-8 node spacings of the curve.
bool contains(const BoundaryCurve& curve, const Point& x);

/// Closed planar region bounded by an outer curve with optional holes.
class Region {
 public:
  explicit Region(BoundaryCurve outer, std::vector<BoundaryCurve> holes = {});

  const BoundaryCurve& outer() const { return outer_; }
  const std::vector<BoundaryCurve>& holes() const { return holes_; }

  /// Euclidean distance from x to the closed region (zero inside).
  double distance(const Point& x) const;

 private:
  BoundaryCurve outer_;
  std::vector<BoundaryCurve> holes_;
};

double hausdorff_distance(const Region& a, const Region& b);
double modified_distance(const Region& a, const Region& b);
double hausdorff_distance(const BoundaryCurve& a, const BoundaryCurve& b);
double modified_distance(const BoundaryCurve& a, const BoundaryCurve& b);

/// Outer domain, inclusion and background conductivity.
class InclusionScene {
 public:
  InclusionScene(BoundaryCurve outer, BoundaryCurve inclusion, double k0);

  const BoundaryCurve& outer() const { return outer_; }
  const BoundaryCurve& inclusion() const { return inclusion_; }
  double k0() const { return k0_; }
  /// Smallest node-to-curve distance between the inclusion and the outer boundary.
  double separation() const { return separation_; }

 private:
  BoundaryCurve outer_;
  BoundaryCurve inclusion_;
  double k0_;
  double separation_ = 0.0;
};

/// a_D(k) = k0 + (k - k0) chi_D.
double conductivity_at(const InclusionScene& scene, double k, const Point& x);

}  // namespace npeit
