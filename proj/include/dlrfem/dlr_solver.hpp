/*! @file dlr_solver.hpp
 *  Dynamical low-rank steps built from an exact linear substep and
 *  basis-update-and-Galerkin (BUG) substeps for the reaction term.
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

struct StepTrace {
  int step = 0;
  Eigen::Index r_in = 0;
  Eigen::Index r_hat = 0;    //!< rank after the first-order BUG substep, <= 2 r_in
  Eigen::Index r_bar = 0;    //!< augmented basis size, <= 4 r_in + 1
  Eigen::Index r_tilde = 0;  //!< rank after truncation
  double trunc_tail = 0.0;
  double eta = 0.0;
  bool clamped = false;
  int kernel_calls = 0;
  double linear_ms = 0.0;
  double nonlinear_ms = 0.0;
  double truncation_ms = 0.0;
  double wall_ms = 0.0;
};

//! Evaluation settings shared by the low-rank substeps.
struct DlrContext {
  NonlinearityKind kind = NonlinearityKind::Classical;
  const TensorGrid2D* grid = nullptr;
  KernelMode mode = KernelMode::Auto;
  int* kernel_calls = nullptr;  //!< incremented per kernel evaluation when set
};

/*! First-order BUG step for dW/dt = N(W).
 *
 *  K and L are advanced by one explicit Euler step, the bases are augmented
 *  with the old ones, and the projected core takes an Euler step. The result
 *  has rank <= 2r and is not truncated.
 */
LowRankState bug1_step(const LowRankState& state, double tau, const DlrContext& ctx);

//! Intermediate quantities of one strang_bug2_step, for inspection in tests.
struct Bug2Internals {
  LowRankState w1;
  LowRankState w2;
  Eigen::MatrixXd Ubar, Vbar;
  Eigen::MatrixXd Sbar1, Sbar3;
};

struct DlrStepResult {
  LowRankState state;
  StepTrace trace;
};

/*! Second-order step: linear half step, BUG step, augmented Galerkin SSP-RK2
 *  update of the core on span[1, U1, N(W1)V1, N(W2)V2], truncation, linear
 *  half step. `half` must hold e^{(tau/2) eps^2 L}.
 */
DlrStepResult strang_bug2_step(const LowRankState& state, double tau, const DlrContext& ctx,
                               const PropagatorPair& half, const RankPolicy& policy,
                               Bug2Internals* internals = nullptr);

//! First-order step: linear step of size tau, BUG step, truncation.
DlrStepResult lie_trotter_step(const LowRankState& state, double tau, const DlrContext& ctx,
                               const PropagatorPair& full, const RankPolicy& policy);

struct DlrTrajectory {
  LowRankState final_state;
  std::vector<DiagnosticsRecord> records;
  std::vector<StepTrace> traces;
};

//! Runs a configuration with one of the low-rank solvers.
DlrTrajectory dlr_run(const RunConfig& config, const RunHooks& hooks = {});

}  // namespace dlrfem
