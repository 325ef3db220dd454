#include "dlrfem/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "dlrfem/config.hpp"
#include "dlrfem/errors.hpp"
#include "dlrfem/full_rank_solver.hpp"

namespace dlrfem {

namespace {

std::string full_precision(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string optional_field(const std::optional<double>& v) { return v ? full_precision(*v) : std::string(); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::filesystem::path resolve_output_dir(const RunConfig& config) {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return config.output_dir;
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
  return std::to_string(r.step) + "," + full_precision(r.time) + "," + full_precision(r.mass) + "," +
         full_precision(r.energy) + "," + optional_field(r.modified_energy) + "," + std::to_string(r.rank) + "," +
         optional_field(r.odd_symmetry_error) + "," + wall;
}

std::string trace_csv_row(const StepTrace& t) {
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", t.wall_ms);
  return std::to_string(t.step) + "," + std::to_string(t.r_in) + "," + std::to_string(t.r_hat) + "," +
         std::to_string(t.r_bar) + "," + std::to_string(t.r_tilde) + "," + full_precision(t.trunc_tail) + "," + wall;
}

std::string snapshot_file_name(double time) { return "snap_t" + format_double(time) + ".csv"; }

std::string snapshot_text(const Eigen::MatrixXd& W, const RunConfig& c, double time) {
  std::ostringstream o;
  o << "# AC2D k=" << c.degree << " m=" << W.rows() << " n=" << W.cols() << " domain=" << format_double(c.x0) << ","
    << format_double(c.x1) << "," << format_double(c.y0) << "," << format_double(c.y1)
    << " time=" << format_double(time) << "\n";
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    for (Eigen::Index j = 0; j < W.cols(); ++j) o << (j ? "," : "") << full_precision(W(i, j));
    o << "\n";
  }
  return o.str();
}

RunSummary execute_run(const RunConfig& config, std::ostream& log) {
  validate(config);
  RunSummary out;
  out.output_dir = resolve_output_dir(config);
  std::error_code ec;
  std::filesystem::create_directories(out.output_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out.output_dir.string() + "': " + ec.message());

  RunHooks hooks;
  hooks.on_snapshot = [&](double t, const Eigen::MatrixXd& W) {
    write_file(out.output_dir / snapshot_file_name(t), snapshot_text(W, config, t));
  };
  hooks.on_record = [&](const DiagnosticsRecord& r) {
    log << "step " << r.step << "  t=" << r.time << "  mass=" << r.mass << "  energy=" << r.energy
        << "  rank=" << r.rank << "\n";
  };

  if (config.solver == SolverKind::FullRank) {
    FrTrajectory t = fr_run(config, hooks);
    out.records = std::move(t.records);
    out.final_state = std::move(t.final_state.W);
  } else {
    DlrTrajectory t = dlr_run(config, hooks);
    out.records = std::move(t.records);
    out.traces = std::move(t.traces);
    out.final_state = t.final_state.densify();
  }

  // The final state is always written, requested or not.
  if (std::find(config.snapshot_times.begin(), config.snapshot_times.end(), config.final_time) ==
      config.snapshot_times.end())
    hooks.on_snapshot(config.final_time, out.final_state);

  std::string diag = std::string(kDiagnosticsHeader) + "\n";
  for (const auto& r : out.records) diag += diagnostics_csv_row(r) + "\n";
  write_file(out.output_dir / "diagnostics.csv", diag);
  if (config.write_trace && config.solver != SolverKind::FullRank) {
    std::string trace = std::string(kTraceHeader) + "\n";
    for (const auto& t : out.traces) trace += trace_csv_row(t) + "\n";
    write_file(out.output_dir / "trace.csv", trace);
  }
  write_file(out.output_dir / "config.used", emit_config(config));
  return out;
}

Eigen::MatrixXd final_nodal_values(const RunConfig& config) {
  if (config.solver == SolverKind::FullRank) return fr_run(config).final_state.W;
  return dlr_run(config).final_state.densify();
}

StudyAxis study_axis_from_string(const std::string& name) {
  if (name == "spatial") return StudyAxis::Spatial;
  if (name == "temporal") return StudyAxis::Temporal;
  throw ConfigError("unknown study axis '" + name + "' (expected spatial or temporal)");
}

RatesTable run_convergence_study(const RunConfig& base, StudyAxis axis, int levels) {
  if (levels < 3) throw ConfigError("a convergence study needs at least 3 levels");
  validate(base);
  RunConfig quiet = base;
  quiet.snapshot_times.clear();
  quiet.diagnostics_every = std::numeric_limits<int>::max();
  quiet.symmetry_diagnostic = false;

  RatesTable table;
  table.axis = axis;
  auto level_config = [&](int l) {
    RunConfig c = quiet;
    if (axis == StudyAxis::Spatial) {
      c.elements_x = base.elements_x << l;
      c.elements_y = base.elements_y << l;
    } else {
      c.tau = base.tau / std::ldexp(1.0, l);
    }
    return c;
  };

  RunConfig ref_cfg = level_config(axis == StudyAxis::Spatial ? levels : levels - 1);
  if (axis == StudyAxis::Temporal) ref_cfg.tau /= 8.0;
  const TensorGrid2D ref_grid = make_grid(ref_cfg);
  const Eigen::MatrixXd ref = final_nodal_values(ref_cfg);

  double scale = 0.0;
  for (int l = 0; l < levels; ++l) {
    const RunConfig c = level_config(l);
    const TensorGrid2D grid = make_grid(c);
    const Eigen::MatrixXd W = final_nodal_values(c);
    const Eigen::MatrixXd R = axis == StudyAxis::Spatial ? evaluate_fe_on_nodes(ref, ref_grid, grid) : ref;
    table.params.push_back(axis == StudyAxis::Spatial ? (c.x1 - c.x0) / c.elements_x : c.tau);
    table.errors.push_back(l2h_error(W, R, grid));
    scale = std::max(scale, weighted_norm(R, grid.gx, grid.gy));
  }

  table.exact = true;
  for (double e : table.errors) table.exact = table.exact && e <= 1e-12 * (1.0 + scale);
  if (table.exact) {
    table.slope = std::numeric_limits<double>::quiet_NaN();
    return table;
  }
  const ConvergenceFit fit = convergence_order(table.params, table.errors);
  table.slope = fit.slope;
  table.pairwise = fit.pairwise;
  return table;
}

std::string rates_csv(const RatesTable& t) {
  std::string s = std::string(kRatesHeader) + "\n";
  for (std::size_t i = 0; i < t.params.size(); ++i) {
    s += full_precision(t.params[i]) + "," + full_precision(t.errors[i]) + ",";
    if (i > 0 && !t.pairwise.empty()) s += full_precision(t.pairwise[i - 1]);
    s += "\n";
  }
  return s;
}

}  // namespace dlrfem
