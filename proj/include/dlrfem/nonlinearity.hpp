/*! @file nonlinearity.hpp
 *  Reaction terms of the Allen-Cahn variants and their factored evaluation.
 *
 *  Factored kernels take W = U S V^T and never form W. They expand the cubic
 *  term as a sum over index triples i <= j <= l of Hadamard products of the
 *  columns of K = U S and V, weighted by the number of distinct permutations.
 */
#pragma once

#include <Eigen/Dense>
#include <string>

#include "dlrfem/mesh_basis.hpp"
#include "dlrfem/state.hpp"

namespace dlrfem {

enum class NonlinearityKind {
  Classical,         //!< N(W) = W - W^3
  ConservativeRSLM,  //!< minus the mean of W - W^3
  ConservativeBBLM,  //!< minus beta (1 - W^2), beta = (W-W^3,1)_M / (1-W^2,1)_M
  Zero,              //!< N = 0 (linear-only runs)
  Identity,          //!< N(W) = W (test hook)
};

std::string to_string(NonlinearityKind kind);
NonlinearityKind nonlinearity_from_string(const std::string& name);

//! Relative size of (1 - W^2, 1)_M / |Omega| below which BBLM is degenerate.
inline constexpr double kBblmDenominatorTol = 1e-14;

//! How the factored kernels evaluate their Galerkin blocks.
enum class KernelMode {
  Factored,  //!< Hadamard expansion, O((m+n) r^3) per test column
  Dense,     //!< form W, apply N pointwise, project
  Auto,      //!< whichever of the two has the lower operation count
};

std::string to_string(KernelMode mode);
KernelMode kernel_mode_from_string(const std::string& name);

//! Pointwise-plus-nonlocal reaction term on full nodal values.
Eigen::MatrixXd n_dense(const Eigen::MatrixXd& W, NonlinearityKind kind, const TensorGrid2D& grid);

//! Scalars of W = U S V^T needed by the nonlocal multipliers.
struct NonlinearScalars {
  double mass = 0.0;       //!< (W, 1)_M
  double quadratic = 0.0;  //!< (W^2, 1)_M
  double cubic = 0.0;      //!< (W^3, 1)_M
};

NonlinearScalars n_scalars(const LowRankState& w, const TensorGrid2D& grid);
NonlinearScalars n_scalars_dense(const Eigen::MatrixXd& W, const TensorGrid2D& grid);

//! N(U S V^T) M_y Vtest, shape m x cols(Vtest).
Eigen::MatrixXd n_times_v(const LowRankState& w, const Eigen::MatrixXd& Vtest, NonlinearityKind kind,
                          const TensorGrid2D& grid, KernelMode mode = KernelMode::Factored);

//! N(U S V^T)^T M_x Utest, shape n x cols(Utest).
Eigen::MatrixXd n_transpose_times_u(const LowRankState& w, const Eigen::MatrixXd& Utest, NonlinearityKind kind,
                                    const TensorGrid2D& grid, KernelMode mode = KernelMode::Factored);

//! Ubar^T M_x N(U S V^T) M_y Vbar.
Eigen::MatrixXd projected_n(const Eigen::MatrixXd& Ubar, const LowRankState& w, const Eigen::MatrixXd& Vbar,
                            NonlinearityKind kind, const TensorGrid2D& grid, KernelMode mode = KernelMode::Factored);

//! Number of nodes with |W_ij| > 1 (maximum-principle overshoot).
int overshoot_count(const Eigen::MatrixXd& W);

}  // namespace dlrfem
