/*! @file mesh_basis.hpp
 *  Gauss-Lobatto nodal elements on uniform 1D meshes and their tensor
 *  product on a rectangle.
 */
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dlrfem/state.hpp"

namespace dlrfem {

//! Quadrature rule on the reference interval [0,1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
};

inline constexpr int kMaxDegree = 8;

//! (k+1)-point Gauss-Lobatto rule on [0,1], 1 <= k <= kMaxDegree.
//! Points ascend, include both endpoints, and are symmetric about 1/2.
QuadratureRule gauss_lobatto_rule(int k);

//! n-point Gauss-Legendre rule on [0,1], exact for degree 2n-1.
QuadratureRule gauss_legendre_rule(int n);

//! Lagrange basis on the nodes of a reference rule.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(std::vector<double> nodes);
  std::size_t size() const { return nodes_.size(); }
  double value(std::size_t j, double xi) const;
  double derivative(std::size_t j, double xi) const;

 private:
  std::vector<double> nodes_;
};

/*! Uniform 1D mesh of degree-k Gauss-Lobatto elements.
 *
 *  Node i of element e sits at a + h*(e + xi_i). The mass matrix is the
 *  lumped (diagonal) one obtained from the Gauss-Lobatto rule. The stiffness
 *  matrix uses natural (Neumann) boundary conditions, so A*1 = 0.
 */
class Grid1D {
 public:
  Grid1D(int k, int elements, double a, double b);

  int degree() const { return k_; }
  int elements() const { return elements_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double h() const { return h_; }
  Eigen::Index size() const { return nodes_.size(); }
  double length() const { return b_ - a_; }

  const Eigen::VectorXd& nodes() const { return nodes_; }
  //! Lumped mass diagonal; sums to b - a.
  const Eigen::VectorXd& mass_diag() const { return mass_; }
  const Eigen::VectorXd& lumped_weights() const { return mass_; }
  //! Dense storage of the banded stiffness matrix (bandwidth 2k+1).
  const Eigen::MatrixXd& stiffness() const { return stiffness_; }
  //! A*X exploiting the band.
  Eigen::MatrixXd apply_stiffness(const Eigen::MatrixXd& X) const;

  const QuadratureRule& reference_rule() const { return rule_; }
  const LagrangeBasis& reference_basis() const { return basis_; }

  //! Element containing x (last element for x == b) and local coordinate in [0,1].
  std::pair<int, double> locate(double x) const;

 private:
  int k_;
  int elements_;
  double a_, b_, h_;
  QuadratureRule rule_;
  LagrangeBasis basis_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd mass_;
  Eigen::MatrixXd stiffness_;
};

//! Same as the Grid1D constructor; throws ConfigError on unsupported input.
Grid1D build_grid(int k, int elements, double a, double b);

//! Tensor-product grid; row index follows x, column index follows y.
struct TensorGrid2D {
  Grid1D gx;
  Grid1D gy;
  Eigen::Index rows() const { return gx.size(); }
  Eigen::Index cols() const { return gy.size(); }
  //! |Omega| computed from the quadrature weights.
  double area() const { return gx.mass_diag().sum() * gy.mass_diag().sum(); }
};

using ScalarField = std::function<double(double, double)>;

//! Nodal interpolant W_ij = u0(x_i, y_j); throws InputError on non-finite samples.
FullState interpolate_initial(const TensorGrid2D& grid, const ScalarField& u0);

}  // namespace dlrfem
