#include "dlrfem/full_rank_solver.hpp"

#include <cmath>
#include <iostream>

#include "dlrfem/errors.hpp"
#include "run_support.hpp"

namespace dlrfem {

namespace detail {

RecordMaker::RecordMaker(const RunConfig& config, const TensorGrid2D& grid, PropagatorCache& cache)
    : config_(config), grid_(grid) {
  const double eps2 = config.epsilon * config.epsilon;
  half_ = cache.get(0.5 * config.tau * eps2);
  if (config.variant == NonlinearityKind::Classical) modified_.emplace(config.tau, config.epsilon, grid);
}

bool RecordMaker::due(int step, bool last) const {
  return last || step == 0 || (config_.diagnostics_every > 0 && step % config_.diagnostics_every == 0);
}

DiagnosticsRecord RecordMaker::make(int step, double time, const Eigen::MatrixXd& W, int rank, double wall_ms) const {
  DiagnosticsRecord r;
  r.step = step;
  r.time = time;
  r.mass = mass(W, grid_);
  r.energy = energy(W, config_.epsilon, grid_);
  // The retained half-step state of the next step is e^{(tau/2) eps^2 L} W.
  if (modified_) r.modified_energy = (*modified_)(apply_linear_step(W, half_));
  r.rank = rank;
  if (config_.symmetry_diagnostic) r.odd_symmetry_error = odd_symmetry_error(W, grid_);
  r.overshoot_count = overshoot_count(W);
  r.wall_ms = wall_ms;
  return r;
}

void warn_on_step_size(const RunConfig& config) {
  if (config.variant == NonlinearityKind::Classical && config.tau > 2.0)
    std::cerr << "warning: tau = " << config.tau << " exceeds 2; modified-energy decay is not guaranteed\n";
  if ((config.variant == NonlinearityKind::ConservativeRSLM || config.variant == NonlinearityKind::ConservativeBBLM) &&
      config.tau_bound && config.tau > *config.tau_bound)
    std::cerr << "warning: tau = " << config.tau << " exceeds the configured bound " << *config.tau_bound << "\n";
}

bool is_snapshot_time(const RunConfig& config, double t) {
  for (double s : config.snapshot_times)
    if (s == t) return true;
  return false;
}

}  // namespace detail

Eigen::MatrixXd ssp_rk2_nonlinear(const Eigen::MatrixXd& W, double tau, NonlinearityKind kind,
                                  const TensorGrid2D& grid) {
  const Eigen::MatrixXd N0 = n_dense(W, kind, grid);
  const Eigen::MatrixXd Z1 = W + tau * N0;
  return W + 0.5 * tau * (N0 + n_dense(Z1, kind, grid));
}

FrStepResult fr_strang_step(const FullState& state, double tau, NonlinearityKind kind, const TensorGrid2D& grid,
                            const PropagatorPair& half) {
  FrStepResult out;
  out.w1 = apply_linear_step(state.W, half);
  const Eigen::MatrixXd w3 = ssp_rk2_nonlinear(out.w1, tau, kind, grid);
  out.state.W = apply_linear_step(w3, half);
  out.state.time = state.time + tau;
  if (!out.state.W.allFinite()) throw NumericError("state became non-finite");
  return out;
}

FrTrajectory fr_run(const RunConfig& config, const RunHooks& hooks) {
  validate(config);
  const TensorGrid2D grid = make_grid(config);
  FullState state = interpolate_initial(grid, make_initial_field(config));
  detail::warn_on_step_size(config);

  PropagatorCache cache(grid);
  const detail::RecordMaker records(config, grid, cache);
  const TimeSchedule schedule(config.tau, config.final_time, config.snapshot_times);
  const double eps2 = config.epsilon * config.epsilon;
  const int rank = static_cast<int>(std::min(grid.rows(), grid.cols()));

  FrTrajectory traj;
  auto emit = [&](const DiagnosticsRecord& r) {
    traj.records.push_back(r);
    if (hooks.on_record) hooks.on_record(r);
  };
  const detail::Stopwatch clock;
  emit(records.make(0, 0.0, state.W, rank, 0.0));
  if (hooks.on_snapshot && detail::is_snapshot_time(config, 0.0)) hooks.on_snapshot(0.0, state.W);

  int step = 0;
  for (const auto& s : schedule.steps()) {
    ++step;
    try {
      state = fr_strang_step(state, s.dt, config.variant, grid, cache.get(0.5 * s.dt * eps2)).state;
    } catch (const std::exception& e) {
      throw StepFailure(step, s.t0, e.what());
    }
    const double t = s.t1;
    state.time = t;
    const bool last = step == static_cast<int>(schedule.size());
    if (records.due(step, last)) emit(records.make(step, t, state.W, rank, clock.ms()));
    if (hooks.on_snapshot && s.ends_at_stop && detail::is_snapshot_time(config, t)) hooks.on_snapshot(t, state.W);
  }
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace dlrfem
