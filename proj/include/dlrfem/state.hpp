/*! @file state.hpp
 *  Dense and factored solution states.
 */
#pragma once

#include <Eigen/Dense>
#include <algorithm>

namespace dlrfem {

//! Nodal values W (m x n) at a time.
struct FullState {
  Eigen::MatrixXd W;
  double time = 0.0;
};

/*! W = U S V^T with U^T M_x U = I and V^T M_y V = I.
 *
 *  S is square after every truncation. Intermediate states produced by the
 *  augmented steps may carry a rectangular S.
 */
struct LowRankState {
  Eigen::MatrixXd U;
  Eigen::MatrixXd S;
  Eigen::MatrixXd V;
  double time = 0.0;

  Eigen::Index rank() const { return std::max(S.rows(), S.cols()); }
  Eigen::MatrixXd densify() const { return U * S * V.transpose(); }
};

}  // namespace dlrfem
