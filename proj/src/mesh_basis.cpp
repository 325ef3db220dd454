#include "dlrfem/mesh_basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dlrfem/errors.hpp"

namespace dlrfem {

namespace {

// Legendre P_n(x) and P_{n-1}(x) by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
  double p_prev = 1.0, p = x;
  if (n == 0) return {1.0, 0.0};
  for (int j = 2; j <= n; ++j) {
    const double next = ((2.0 * j - 1.0) * x * p - (j - 1.0) * p_prev) / j;
    p_prev = p;
    p = next;
  }
  return {p, p_prev};
}

QuadratureRule to_unit_interval(std::vector<double> x, std::vector<double> w) {
  const std::size_t n = x.size();
  // Enforce exact mirror symmetry; Newton leaves O(eps) asymmetry.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double xs = 0.5 * (x[n - 1 - i] - x[i]);
    const double ws = 0.5 * (w[i] + w[n - 1 - i]);
    x[i] = -xs;
    x[n - 1 - i] = xs;
    w[i] = w[n - 1 - i] = ws;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  QuadratureRule rule;
  for (std::size_t i = 0; i < n; ++i) {
    rule.points.push_back(0.5 * (x[i] + 1.0));
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_lobatto_rule(int k) {
  if (k < 1 || k > kMaxDegree)
    throw ConfigError("unsupported polynomial degree " + std::to_string(k) + " (supported: 1.." +
                      std::to_string(kMaxDegree) + ")");
  const int n = k + 1;
  std::vector<double> x(n), w(n);
  // Interior nodes are the roots of P'_k; Newton from Chebyshev-Lobatto guesses.
  for (int i = 0; i < n; ++i) {
    double xi = -std::cos(std::numbers::pi * i / k);
    for (int it = 0; it < 100; ++it) {
      const auto [pk, pkm1] = legendre_pair(k, xi);
      const double step = (xi * pk - pkm1) / (n * pk);
      xi -= step;
      if (std::abs(step) <= 1e-15) break;
    }
    x[i] = xi;
    const double pk = legendre_pair(k, xi).first;
    w[i] = 2.0 / (k * (k + 1.0) * pk * pk);
  }
  x.front() = -1.0;
  x.back() = 1.0;
  return to_unit_interval(std::move(x), std::move(w));
}

QuadratureRule gauss_legendre_rule(int n) {
  if (n < 1) throw ContractViolation("Gauss-Legendre rule needs at least one point");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double xi = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const auto [p, pm1] = legendre_pair(n, xi);
      dp = n * (xi * p - pm1) / (xi * xi - 1.0);
      const double step = p / dp;
      xi -= step;
      if (std::abs(step) <= 1e-15) break;
    }
    const auto [p, pm1] = legendre_pair(n, xi);
    dp = n * (xi * p - pm1) / (xi * xi - 1.0);
    x[i] = xi;
    w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  return to_unit_interval(std::move(x), std::move(w));
}

LagrangeBasis::LagrangeBasis(std::vector<double> nodes) : nodes_(std::move(nodes)) {}

double LagrangeBasis::value(std::size_t j, double xi) const {
  double v = 1.0;
  for (std::size_t l = 0; l < nodes_.size(); ++l)
    if (l != j) v *= (xi - nodes_[l]) / (nodes_[j] - nodes_[l]);
  return v;
}

double LagrangeBasis::derivative(std::size_t j, double xi) const {
  double d = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (i == j) continue;
    double term = 1.0 / (nodes_[j] - nodes_[i]);
    for (std::size_t l = 0; l < nodes_.size(); ++l)
      if (l != j && l != i) term *= (xi - nodes_[l]) / (nodes_[j] - nodes_[l]);
    d += term;
  }
  return d;
}

Grid1D::Grid1D(int k, int elements, double a, double b)
    : k_(k), elements_(elements), a_(a), b_(b), rule_(gauss_lobatto_rule(k)), basis_(rule_.points) {
  if (elements < 1) throw ConfigError("element count must be >= 1, got " + std::to_string(elements));
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw ConfigError("interval must satisfy a < b, got [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  h_ = (b - a) / elements;
  const Eigen::Index m = static_cast<Eigen::Index>(elements) * k + 1;
  nodes_.resize(m);
  mass_.setZero(m);
  stiffness_.setZero(m, m);

  const double len = b - a;
  for (int e = 0; e < elements; ++e)
    for (int i = 0; i <= k; ++i) nodes_[e * k + i] = a + len * ((e + rule_.points[i]) / elements);
  nodes_[m - 1] = b;

  // Element stiffness on [0,1]: the integrand has degree 2k-2, so k+1
  // Gauss-Legendre points integrate it exactly.
  const QuadratureRule gl = gauss_legendre_rule(k + 1);
  Eigen::MatrixXd kref = Eigen::MatrixXd::Zero(k + 1, k + 1);
  for (std::size_t q = 0; q < gl.points.size(); ++q)
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j <= k; ++j)
        kref(i, j) += gl.weights[q] * basis_.derivative(i, gl.points[q]) * basis_.derivative(j, gl.points[q]);
  kref = 0.5 * (kref + kref.transpose()).eval();

  for (int e = 0; e < elements; ++e) {
    const Eigen::Index off = static_cast<Eigen::Index>(e) * k;
    for (int i = 0; i <= k; ++i) {
      mass_[off + i] += h_ * rule_.weights[i];
      for (int j = 0; j <= k; ++j) stiffness_(off + i, off + j) += kref(i, j) / h_;
    }
  }
}

Eigen::MatrixXd Grid1D::apply_stiffness(const Eigen::MatrixXd& X) const {
  if (X.rows() != size()) throw ContractViolation("apply_stiffness: row count mismatch");
  const Eigen::Index m = size();
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(m, X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c)
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index lo = std::max<Eigen::Index>(0, i - k_);
      const Eigen::Index hi = std::min<Eigen::Index>(m - 1, i + k_);
      double s = 0.0;
      for (Eigen::Index j = lo; j <= hi; ++j) s += stiffness_(i, j) * X(j, c);
      Y(i, c) = s;
    }
  return Y;
}

std::pair<int, double> Grid1D::locate(double x) const {
  const double tol = 1e-12 * (b_ - a_);
  if (!(x >= a_ - tol && x <= b_ + tol))
    throw InputError("point " + std::to_string(x) + " outside [" + std::to_string(a_) + ", " + std::to_string(b_) + "]");
  const double t = (x - a_) / h_;
  int e = static_cast<int>(std::floor(t));
  e = std::clamp(e, 0, elements_ - 1);
  return {e, std::clamp(t - e, 0.0, 1.0)};
}

Grid1D build_grid(int k, int elements, double a, double b) { return Grid1D(k, elements, a, b); }

FullState interpolate_initial(const TensorGrid2D& grid, const ScalarField& u0) {
  FullState s;
  s.W.resize(grid.rows(), grid.cols());
  for (Eigen::Index j = 0; j < grid.cols(); ++j)
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
      const double v = u0(grid.gx.nodes()[i], grid.gy.nodes()[j]);
      if (!std::isfinite(v))
        throw InputError("initial condition is not finite at node (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      s.W(i, j) = v;
    }
  return s;
}

}  // namespace dlrfem
