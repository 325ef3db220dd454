/*! @file full_rank_solver.hpp
 *  Full-rank Strang splitting: exact linear half steps around an SSP-RK2
 *  reaction step.
 */
#pragma once

#include <vector>

#include "dlrfem/diagnostics.hpp"
#include "dlrfem/nonlinearity.hpp"
#include "dlrfem/run_config.hpp"
#include "dlrfem/schedule.hpp"
#include "dlrfem/state.hpp"
#include "dlrfem/weighted_linalg.hpp"

namespace dlrfem {

//! W + tau/2 N(W) + tau/2 N(W + tau N(W)).
Eigen::MatrixXd ssp_rk2_nonlinear(const Eigen::MatrixXd& W, double tau, NonlinearityKind kind,
                                  const TensorGrid2D& grid);

struct FrStepResult {
  FullState state;
  Eigen::MatrixXd w1;  //!< state after the first linear half step
};

//! One Strang step; `half` must hold e^{(tau/2) eps^2 L} on both axes.
FrStepResult fr_strang_step(const FullState& state, double tau, NonlinearityKind kind, const TensorGrid2D& grid,
                            const PropagatorPair& half);

struct FrTrajectory {
  FullState final_state;
  std::vector<DiagnosticsRecord> records;
};

//! Runs a configuration with the full-rank solver.
FrTrajectory fr_run(const RunConfig& config, const RunHooks& hooks = {});

}  // namespace dlrfem
