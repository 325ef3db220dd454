/*! @file diagnostics.hpp
 *  Physical and numerical observables of dense and factored states.
 */
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "dlrfem/mesh_basis.hpp"
#include "dlrfem/state.hpp"
#include "dlrfem/weighted_linalg.hpp"

namespace dlrfem {

struct DiagnosticsRecord {
  int step = 0;
  double time = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  std::optional<double> modified_energy;
  int rank = 0;
  std::optional<double> odd_symmetry_error;
  int overshoot_count = 0;
  double wall_ms = 0.0;
};

double mass(const Eigen::MatrixXd& W, const TensorGrid2D& grid);
double mass(const LowRankState& w, const TensorGrid2D& grid);

//! (eps^2/2)(A_x W M_y + M_x W A_y, W)_F + (F(W), 1)_M with F(w) = (1 - w^2)^2 / 4.
double energy(const Eigen::MatrixXd& W, double eps, const TensorGrid2D& grid);
double energy(const LowRankState& w, double eps, const TensorGrid2D& grid);

//! Dense polynomial with ascending coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  const std::vector<double>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  double operator()(double x) const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  //! p(q(x)).
  Polynomial compose(const Polynomial& q) const;
  //! Antiderivative vanishing at 0.
  Polynomial integral() const;

 private:
  std::vector<double> c_;
};

/*! Discrete modified energy of the classical Strang scheme.
 *
 *  E~(W1) = (1/2tau)((e^{-tau eps^2 L} - I) W1, W1)_M + (G(W1), 1)_M, where
 *  W1 is the state after the first linear half step, G(w) = 1/4 + int_0^w g
 *  and g(s) = -f(s)/2 - f(s + tau f(s))/2 with f(z) = z - z^3.
 *  Nonincreasing for tau <= 2.
 */
class ModifiedEnergy {
 public:
  ModifiedEnergy(double tau, double eps, const TensorGrid2D& grid);
  double operator()(const Eigen::MatrixXd& W1) const;
  const Polynomial& potential() const { return G_; }
  double tau() const { return tau_; }

 private:
  double tau_;
  const TensorGrid2D* grid_;
  PropagatorPair backward_;
  Polynomial G_;
};

//! Convenience wrapper that rebuilds the backward propagators.
double modified_energy(const Eigen::MatrixXd& W1, double tau, double eps, const TensorGrid2D& grid);

/*! Largest defect of odd symmetry in each coordinate separately:
 *  max over nodes of |W(x,y) + W(-x,y)| and |W(x,y) + W(x,-y)|, with
 *  reflection through the domain centre.
 */
double odd_symmetry_error(const Eigen::MatrixXd& W, const TensorGrid2D& grid);

//! ||A - B||_M.
double l2h_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const TensorGrid2D& grid);

struct Point2 {
  double x, y;
};

//! Finite element function with nodal values W evaluated at arbitrary points.
Eigen::VectorXd evaluate_fe(const Eigen::MatrixXd& W, const TensorGrid2D& grid, std::span<const Point2> points);

//! Values of the finite element function at every node of `target`.
Eigen::MatrixXd evaluate_fe_on_nodes(const Eigen::MatrixXd& W, const TensorGrid2D& grid, const TensorGrid2D& target);

struct ConvergenceFit {
  double slope = 0.0;             //!< least-squares slope of log(error) against log(param)
  std::vector<double> pairwise;   //!< log(e_i/e_{i+1}) / log(p_i/p_{i+1})
};

//! Requires >= 3 samples, positive errors and pairwise distinct parameters.
ConvergenceFit convergence_order(std::span<const double> params, std::span<const double> errors);

}  // namespace dlrfem
