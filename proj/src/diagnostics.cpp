#include "dlrfem/diagnostics.hpp"

#include <cmath>
#include <string>

#include "dlrfem/errors.hpp"
#include "dlrfem/nonlinearity.hpp"
#include "hadamard.hpp"

namespace dlrfem {

namespace {

void check_shape(const Eigen::MatrixXd& W, const TensorGrid2D& grid, const char* what) {
  if (W.rows() != grid.rows() || W.cols() != grid.cols())
    throw ContractViolation(std::string(what) + ": state shape does not match grid");
}

double potential_sum(const Eigen::MatrixXd& W, const TensorGrid2D& grid, const auto& F) {
  const Eigen::VectorXd& mx = grid.gx.mass_diag();
  const Eigen::VectorXd& my = grid.gy.mass_diag();
  double total = 0.0;
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < W.rows(); ++i) col += mx[i] * F(W(i, j));
    total += my[j] * col;
  }
  return total;
}

// Rows: target coordinates; columns: nodal basis functions of `grid`.
Eigen::MatrixXd interpolation_matrix(const Grid1D& grid, const Eigen::VectorXd& targets) {
  const int k = grid.degree();
  Eigen::MatrixXd I = Eigen::MatrixXd::Zero(targets.size(), grid.size());
  for (Eigen::Index t = 0; t < targets.size(); ++t) {
    const auto [e, xi] = grid.locate(targets[t]);
    for (int a = 0; a <= k; ++a) I(t, static_cast<Eigen::Index>(e) * k + a) = grid.reference_basis().value(a, xi);
  }
  return I;
}

}  // namespace

double mass(const Eigen::MatrixXd& W, const TensorGrid2D& grid) {
  check_shape(W, grid, "mass");
  return n_scalars_dense(W, grid).mass;
}

double mass(const LowRankState& w, const TensorGrid2D& grid) {
  const Eigen::RowVectorXd a = grid.gx.mass_diag().transpose() * w.U;
  const Eigen::VectorXd b = w.V.transpose() * grid.gy.mass_diag();
  return a * w.S * b;
}

double energy(const Eigen::MatrixXd& W, double eps, const TensorGrid2D& grid) {
  check_shape(W, grid, "energy");
  const Eigen::MatrixXd AxW = grid.gx.apply_stiffness(W);
  const Eigen::MatrixXd WAy = grid.gy.apply_stiffness(W.transpose()).transpose();
  const Eigen::VectorXd& mx = grid.gx.mass_diag();
  const Eigen::VectorXd& my = grid.gy.mass_diag();
  double grad = 0.0;
  for (Eigen::Index j = 0; j < W.cols(); ++j)
    grad += my[j] * AxW.col(j).dot(W.col(j)) + (mx.cwiseProduct(WAy.col(j))).dot(W.col(j));
  const double pot = potential_sum(W, grid, [](double w) {
    const double d = 1.0 - w * w;
    return 0.25 * d * d;
  });
  return 0.5 * eps * eps * grad + pot;
}

double energy(const LowRankState& w, double eps, const TensorGrid2D& grid) {
  const Eigen::VectorXd& mx = grid.gx.mass_diag();
  const Eigen::VectorXd& my = grid.gy.mass_diag();
  const Eigen::MatrixXd UAU = w.U.transpose() * grid.gx.apply_stiffness(w.U);
  const Eigen::MatrixXd UMU = w.U.transpose() * mx.asDiagonal() * w.U;
  const Eigen::MatrixXd VAV = w.V.transpose() * grid.gy.apply_stiffness(w.V);
  const Eigen::MatrixXd VMV = w.V.transpose() * my.asDiagonal() * w.V;
  const double grad = (UAU * w.S * VMV * w.S.transpose()).trace() + (UMU * w.S * VAV * w.S.transpose()).trace();

  const Eigen::MatrixXd K = w.U * w.S;
  const double quad = detail::hadamard_total(2, K, w.V, mx, my);
  Eigen::MatrixXd A2, B2;
  detail::square_factors(K, w.V, A2, B2);
  const double quart = ((A2.transpose() * mx.asDiagonal() * A2) * (B2.transpose() * my.asDiagonal() * B2)).trace();
  const double pot = 0.25 * grid.area() - 0.5 * quad + 0.25 * quart;
  return 0.5 * eps * eps * grad + pot;
}

double Polynomial::operator()(double x) const {
  double v = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
  return v;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (c_.empty() || o.c_.empty()) return Polynomial();
  std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(double s) const {
  std::vector<double> r = c_;
  for (double& v : r) v *= s;
  return Polynomial(std::move(r));
}

Polynomial Polynomial::compose(const Polynomial& q) const {
  if (c_.empty()) return Polynomial();
  Polynomial result({c_.back()});
  for (auto it = c_.rbegin() + 1; it != c_.rend(); ++it) result = result * q + Polynomial({*it});
  return result;
}

Polynomial Polynomial::integral() const {
  std::vector<double> r(c_.size() + 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) r[i + 1] = c_[i] / static_cast<double>(i + 1);
  return Polynomial(std::move(r));
}

ModifiedEnergy::ModifiedEnergy(double tau, double eps, const TensorGrid2D& grid) : tau_(tau), grid_(&grid) {
  if (!(tau > 0.0)) throw ContractViolation("modified energy needs tau > 0");
  const double s = -tau * eps * eps;
  backward_.x = std::make_shared<const Propagator>(make_propagator(grid.gx, s));
  backward_.y = std::make_shared<const Propagator>(make_propagator(grid.gy, s));
  const Polynomial f({0.0, 1.0, 0.0, -1.0});
  const Polynomial inner({0.0, 1.0 + tau, 0.0, -tau});
  const Polynomial g = f * -0.5 + f.compose(inner) * -0.5;
  G_ = g.integral() + Polynomial({0.25});
}

double ModifiedEnergy::operator()(const Eigen::MatrixXd& W1) const {
  check_shape(W1, *grid_, "modified_energy");
  const Eigen::MatrixXd back = apply_linear_step(W1, backward_);
  const double linear = weighted_inner(back - W1, W1, grid_->gx, grid_->gy) / (2.0 * tau_);
  return linear + potential_sum(W1, *grid_, [this](double w) { return G_(w); });
}

double modified_energy(const Eigen::MatrixXd& W1, double tau, double eps, const TensorGrid2D& grid) {
  return ModifiedEnergy(tau, eps, grid)(W1);
}

double odd_symmetry_error(const Eigen::MatrixXd& W, const TensorGrid2D& grid) {
  check_shape(W, grid, "odd_symmetry_error");
  for (const Grid1D* g : {&grid.gx, &grid.gy}) {
    const Eigen::VectorXd& x = g->nodes();
    const Eigen::Index m = x.size();
    for (Eigen::Index i = 0; i < m; ++i)
      if (std::abs(x[i] + x[m - 1 - i] - (g->a() + g->b())) > 1e-12 * g->length())
        throw UnsupportedError("odd_symmetry_error: grid is not symmetric about its centre");
  }
  const Eigen::Index m = W.rows(), n = W.cols();
  double err = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      err = std::max({err, std::abs(W(i, j) + W(m - 1 - i, j)), std::abs(W(i, j) + W(i, n - 1 - j))});
  return err;
}

double l2h_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const TensorGrid2D& grid) {
  check_shape(A, grid, "l2h_error");
  check_shape(B, grid, "l2h_error");
  return weighted_norm(A - B, grid.gx, grid.gy);
}

Eigen::VectorXd evaluate_fe(const Eigen::MatrixXd& W, const TensorGrid2D& grid, std::span<const Point2> points) {
  check_shape(W, grid, "evaluate_fe");
  const int kx = grid.gx.degree(), ky = grid.gy.degree();
  Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto [ex, xi] = grid.gx.locate(points[p].x);
    const auto [ey, eta] = grid.gy.locate(points[p].y);
    double v = 0.0;
    for (int a = 0; a <= kx; ++a) {
      const double pa = grid.gx.reference_basis().value(a, xi);
      for (int b = 0; b <= ky; ++b)
        v += pa * grid.gy.reference_basis().value(b, eta) * W(ex * kx + a, ey * ky + b);
    }
    out[static_cast<Eigen::Index>(p)] = v;
  }
  return out;
}

Eigen::MatrixXd evaluate_fe_on_nodes(const Eigen::MatrixXd& W, const TensorGrid2D& grid, const TensorGrid2D& target) {
  check_shape(W, grid, "evaluate_fe_on_nodes");
  const Eigen::MatrixXd Ix = interpolation_matrix(grid.gx, target.gx.nodes());
  const Eigen::MatrixXd Iy = interpolation_matrix(grid.gy, target.gy.nodes());
  return Ix * W * Iy.transpose();
}

ConvergenceFit convergence_order(std::span<const double> params, std::span<const double> errors) {
  if (params.size() != errors.size()) throw ContractViolation("convergence_order: length mismatch");
  if (params.size() < 3) throw DegenerateDataError("convergence_order needs at least 3 samples");
  const std::size_t n = params.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i]))
      throw DegenerateDataError("convergence_order: error " + std::to_string(i) + " is not positive");
    if (!(params[i] > 0.0)) throw DegenerateDataError("convergence_order: parameters must be positive");
    if (i > 0 && params[i] == params[i - 1]) throw DegenerateDataError("convergence_order: repeated parameter");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(params[i]);
    my += std::log(errors[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(params[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  ConvergenceFit fit;
  fit.slope = sxy / sxx;
  for (std::size_t i = 0; i + 1 < n; ++i)
    fit.pairwise.push_back(std::log(errors[i] / errors[i + 1]) / std::log(params[i] / params[i + 1]));
  return fit;
}

}  // namespace dlrfem
