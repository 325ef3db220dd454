/*! @file reference_kernels.hpp
 *  Serial, deliberately plain versions of the hot kernels.
 *
 *  These loop over every ordered index triple without exploiting symmetry
 *  and use no OpenMP. They are the baseline for tests and the benchmark.
 */
#pragma once

#include <Eigen/Dense>

#include "dlrfem/mesh_basis.hpp"
#include "dlrfem/nonlinearity.hpp"
#include "dlrfem/state.hpp"

namespace dlrfem::reference {

Eigen::MatrixXd n_dense(const Eigen::MatrixXd& W, NonlinearityKind kind, const TensorGrid2D& grid);
NonlinearScalars n_scalars(const LowRankState& w, const TensorGrid2D& grid);
Eigen::MatrixXd n_times_v(const LowRankState& w, const Eigen::MatrixXd& Vtest, NonlinearityKind kind,
                          const TensorGrid2D& grid);
Eigen::MatrixXd n_transpose_times_u(const LowRankState& w, const Eigen::MatrixXd& Utest, NonlinearityKind kind,
                                    const TensorGrid2D& grid);
Eigen::MatrixXd projected_n(const Eigen::MatrixXd& Ubar, const LowRankState& w, const Eigen::MatrixXd& Vbar,
                            NonlinearityKind kind, const TensorGrid2D& grid);
//! Ex W Ey^T by explicit loops.
Eigen::MatrixXd linear_step(const Eigen::MatrixXd& W, const Eigen::MatrixXd& Ex, const Eigen::MatrixXd& Ey);

}  // namespace dlrfem::reference
