#include "npeit/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace npeit {

namespace {
constexpr double kPi = std::numbers::pi;
}

Eigen::MatrixXd kress_log_weights(int n_nodes) {
  if (n_nodes < 2 || n_nodes % 2 != 0) throw std::invalid_argument("node count must be even");
  const int n = n_nodes / 2;
  // Circulant: the weight only depends on i - j.
  Eigen::VectorXd row(n_nodes);
  for (int k = 0; k < n_nodes; ++k) {
    const double d = kPi * k / n;
    double s = 0.0;
    for (int m = 1; m < n; ++m) s += std::cos(m * d) / m;
    row[k] = -2.0 * kPi / n * s - kPi / (double(n) * n) * std::cos(n * d);
  }
  Eigen::MatrixXd w(n_nodes, n_nodes);
  for (int i = 0; i < n_nodes; ++i)
    for (int j = 0; j < n_nodes; ++j) w(i, j) = row[(i - j + n_nodes) % n_nodes];
  return w;
}

Eigen::VectorXd trig_resample(const Eigen::VectorXd& values, int m) {
  const int nn = static_cast<int>(values.size());
  if (nn < 2 || nn % 2 != 0) throw std::invalid_argument("sample count must be even");
  const int n = nn / 2;
  Eigen::VectorXd a(n + 1), b(n + 1);
  for (int k = 0; k <= n; ++k) {
    double sa = 0.0, sb = 0.0;
    for (int j = 0; j < nn; ++j) {
      const double t = 2.0 * kPi * j / nn;
      sa += values[j] * std::cos(k * t);
      sb += values[j] * std::sin(k * t);
    }
    a[k] = 2.0 * sa / nn;
    b[k] = 2.0 * sb / nn;
  }
  Eigen::VectorXd out(m);
  for (int i = 0; i < m; ++i) {
    const double t = 2.0 * kPi * i / m;
    double v = 0.5 * a[0] + 0.5 * a[n] * std::cos(n * t);
    for (int k = 1; k < n; ++k) v += a[k] * std::cos(k * t) + b[k] * std::sin(k * t);
    out[i] = v;
  }
  return out;
}

GaussRule gauss_legendre(double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, 32>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  GaussRule r;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      r.nodes.push_back(mid);
      r.weights.push_back(half * w[i]);
      continue;
    }
    r.nodes.push_back(mid - half * x[i]);
    r.weights.push_back(half * w[i]);
    r.nodes.push_back(mid + half * x[i]);
    r.weights.push_back(half * w[i]);
  }
  return r;
}

}  // namespace npeit
