#include "dlrfem/dlr_solver.hpp"

#include "dlrfem/errors.hpp"
#include "run_support.hpp"

namespace dlrfem {

namespace {

const TensorGrid2D& grid_of(const DlrContext& ctx) {
  if (!ctx.grid) throw ContractViolation("low-rank step: context has no grid");
  return *ctx.grid;
}

void count(const DlrContext& ctx, int n = 1) {
  if (ctx.kernel_calls) *ctx.kernel_calls += n;
}

Eigen::MatrixXd hcat(std::initializer_list<const Eigen::MatrixXd*> blocks) {
  Eigen::Index rows = (*blocks.begin())->rows(), cols = 0;
  for (const auto* b : blocks) cols += b->cols();
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index c = 0;
  for (const auto* b : blocks) {
    out.middleCols(c, b->cols()) = *b;
    c += b->cols();
  }
  return out;
}

// Core of `w` expressed in the bases (Unew, Vnew): (Unew^T M_x U) S (Vnew^T M_y V)^T.
Eigen::MatrixXd project_core(const LowRankState& w, const Eigen::MatrixXd& Unew, const Eigen::MatrixXd& Vnew,
                             const TensorGrid2D& grid) {
  const Eigen::MatrixXd Mu = Unew.transpose() * grid.gx.mass_diag().asDiagonal() * w.U;
  const Eigen::MatrixXd Nv = Vnew.transpose() * grid.gy.mass_diag().asDiagonal() * w.V;
  return Mu * w.S * Nv.transpose();
}

// Projected reaction term of the state (Ubar, S, Vbar).
Eigen::MatrixXd galerkin_rhs(const Eigen::MatrixXd& Ubar, const Eigen::MatrixXd& S, const Eigen::MatrixXd& Vbar,
                             const DlrContext& ctx) {
  count(ctx);
  const LowRankState w{Ubar, S, Vbar, 0.0};
  return projected_n(Ubar, w, Vbar, ctx.kind, grid_of(ctx), ctx.mode);
}

// N(W) M_y V and N(W)^T M_x U for the state itself.
struct SelfProducts {
  Eigen::MatrixXd nk;  // m x cols(V)
  Eigen::MatrixXd nl;  // n x cols(U)
};

SelfProducts self_products(const LowRankState& w, const DlrContext& ctx) {
  count(ctx, 2);
  const TensorGrid2D& grid = grid_of(ctx);
  return {n_times_v(w, w.V, ctx.kind, grid, ctx.mode), n_transpose_times_u(w, w.U, ctx.kind, grid, ctx.mode)};
}

LowRankState bug1_with(const LowRankState& w, double tau, const DlrContext& ctx, const SelfProducts& np) {
  const TensorGrid2D& grid = grid_of(ctx);
  const Eigen::MatrixXd K1 = w.U * w.S + tau * np.nk;
  const Eigen::MatrixXd L1 = w.V * w.S.transpose() + tau * np.nl;
  LowRankState out;
  out.U = orthonormal_basis(hcat({&K1, &w.U}), grid.gx.mass_diag());
  out.V = orthonormal_basis(hcat({&L1, &w.V}), grid.gy.mass_diag());
  const Eigen::MatrixXd Sstar = project_core(w, out.U, out.V, grid);
  out.S = Sstar + tau * galerkin_rhs(out.U, Sstar, out.V, ctx);
  out.time = w.time;
  return out;
}

LowRankState apply_truncation(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V, const Truncation& t, double time) {
  return {U * t.R, t.S, V * t.P, time};
}

void check_state(const LowRankState& w, const TensorGrid2D& grid) {
  if (w.U.rows() != grid.rows() || w.V.rows() != grid.cols() || w.S.rows() != w.U.cols() || w.S.cols() != w.V.cols())
    throw ContractViolation("low-rank state does not match grid or its own factor sizes");
}

}  // namespace

LowRankState bug1_step(const LowRankState& state, double tau, const DlrContext& ctx) {
  check_state(state, grid_of(ctx));
  return bug1_with(state, tau, ctx, self_products(state, ctx));
}

DlrStepResult strang_bug2_step(const LowRankState& state, double tau, const DlrContext& ctx,
                               const PropagatorPair& half, const RankPolicy& policy, Bug2Internals* internals) {
  const TensorGrid2D& grid = grid_of(ctx);
  check_state(state, grid);
  const detail::Stopwatch total;
  DlrStepResult res;
  StepTrace& tr = res.trace;
  tr.r_in = state.rank();
  int calls = 0;
  DlrContext local = ctx;
  local.kernel_calls = &calls;

  detail::Stopwatch sw;
  const LowRankState w1 = apply_linear_step(state, half, grid);
  tr.linear_ms += sw.ms();

  sw = detail::Stopwatch();
  const SelfProducts np1 = self_products(w1, local);
  const LowRankState w2 = bug1_with(w1, tau, local, np1);
  tr.r_hat = std::max(w2.U.cols(), w2.V.cols());
  const SelfProducts np2 = self_products(w2, local);

  const Eigen::MatrixXd qm = Eigen::MatrixXd::Ones(grid.rows(), 1);
  const Eigen::MatrixXd qn = Eigen::MatrixXd::Ones(grid.cols(), 1);
  const Eigen::MatrixXd nu1 = tau * np1.nk, nu2 = tau * np2.nk;
  const Eigen::MatrixXd nv1 = tau * np1.nl, nv2 = tau * np2.nl;
  const Eigen::MatrixXd Ubar = orthonormal_basis(hcat({&qm, &w1.U, &nu1, &nu2}), grid.gx.mass_diag());
  const Eigen::MatrixXd Vbar = orthonormal_basis(hcat({&qn, &w1.V, &nv1, &nv2}), grid.gy.mass_diag());
  tr.r_bar = std::max(Ubar.cols(), Vbar.cols());

  const Eigen::MatrixXd S1 = project_core(w1, Ubar, Vbar, grid);
  const Eigen::MatrixXd S2 = S1 + tau * galerkin_rhs(Ubar, S1, Vbar, local);
  const Eigen::MatrixXd S3 = 0.5 * (S1 + S2) + 0.5 * tau * galerkin_rhs(Ubar, S2, Vbar, local);
  tr.nonlinear_ms = sw.ms();

  sw = detail::Stopwatch();
  const Truncation t = truncate_s(S3, policy);
  tr.r_tilde = t.rank;
  tr.trunc_tail = t.tail;
  tr.eta = t.eta;
  tr.clamped = t.clamped;
  const LowRankState w3 = apply_truncation(Ubar, Vbar, t, w1.time);
  tr.truncation_ms = sw.ms();

  sw = detail::Stopwatch();
  res.state = apply_linear_step(w3, half, grid);
  res.state.time = state.time + tau;
  tr.linear_ms += sw.ms();
  if (!res.state.S.allFinite()) throw NumericError("low-rank core became non-finite");

  if (internals) *internals = {w1, w2, Ubar, Vbar, S1, S3};
  tr.kernel_calls = calls;
  count(ctx, calls);
  tr.wall_ms = total.ms();
  return res;
}

DlrStepResult lie_trotter_step(const LowRankState& state, double tau, const DlrContext& ctx,
                               const PropagatorPair& full, const RankPolicy& policy) {
  const TensorGrid2D& grid = grid_of(ctx);
  check_state(state, grid);
  const detail::Stopwatch total;
  DlrStepResult res;
  StepTrace& tr = res.trace;
  tr.r_in = state.rank();
  int calls = 0;
  DlrContext local = ctx;
  local.kernel_calls = &calls;

  detail::Stopwatch sw;
  const LowRankState w1 = apply_linear_step(state, full, grid);
  tr.linear_ms = sw.ms();

  sw = detail::Stopwatch();
  const LowRankState w2 = bug1_step(w1, tau, local);
  tr.r_hat = tr.r_bar = std::max(w2.U.cols(), w2.V.cols());
  tr.nonlinear_ms = sw.ms();

  sw = detail::Stopwatch();
  const Truncation t = truncate_s(w2.S, policy);
  tr.r_tilde = t.rank;
  tr.trunc_tail = t.tail;
  tr.eta = t.eta;
  tr.clamped = t.clamped;
  res.state = apply_truncation(w2.U, w2.V, t, state.time + tau);
  tr.truncation_ms = sw.ms();
  if (!res.state.S.allFinite()) throw NumericError("low-rank core became non-finite");

  tr.kernel_calls = calls;
  count(ctx, calls);
  tr.wall_ms = total.ms();
  return res;
}

DlrTrajectory dlr_run(const RunConfig& config, const RunHooks& hooks) {
  validate(config);
  if (config.solver == SolverKind::FullRank) throw ConfigError("dlr_run called with the full-rank solver selected");
  const TensorGrid2D grid = make_grid(config);
  const FullState initial = interpolate_initial(grid, make_initial_field(config));
  detail::warn_on_step_size(config);

  LowRankState state = weighted_truncated_svd(initial.W, grid, config.rank_policy);
  PropagatorCache cache(grid);
  const detail::RecordMaker records(config, grid, cache);
  const TimeSchedule schedule(config.tau, config.final_time, config.snapshot_times);
  const double eps2 = config.epsilon * config.epsilon;
  const DlrContext ctx{config.variant, &grid, config.kernel, nullptr};

  DlrTrajectory traj;
  auto emit = [&](const DiagnosticsRecord& r) {
    traj.records.push_back(r);
    if (hooks.on_record) hooks.on_record(r);
  };
  const detail::Stopwatch clock;
  {
    const Eigen::MatrixXd W = state.densify();
    emit(records.make(0, 0.0, W, static_cast<int>(state.rank()), 0.0));
    if (hooks.on_snapshot && detail::is_snapshot_time(config, 0.0)) hooks.on_snapshot(0.0, W);
  }

  int step = 0;
  for (const auto& s : schedule.steps()) {
    ++step;
    DlrStepResult res;
    try {
      if (config.solver == SolverKind::Dlr2)
        res = strang_bug2_step(state, s.dt, ctx, cache.get(0.5 * s.dt * eps2), config.rank_policy);
      else
        res = lie_trotter_step(state, s.dt, ctx, cache.get(s.dt * eps2), config.rank_policy);
    } catch (const std::exception& e) {
      throw StepFailure(step, s.t0, e.what());
    }
    state = std::move(res.state);
    state.time = s.t1;
    res.trace.step = step;
    traj.traces.push_back(res.trace);

    const bool last = step == static_cast<int>(schedule.size());
    const bool snap = hooks.on_snapshot && s.ends_at_stop && detail::is_snapshot_time(config, s.t1);
    if (records.due(step, last) || snap) {
      const Eigen::MatrixXd W = state.densify();
      if (records.due(step, last)) emit(records.make(step, s.t1, W, static_cast<int>(state.rank()), clock.ms()));
      if (snap) hooks.on_snapshot(s.t1, W);
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace dlrfem
