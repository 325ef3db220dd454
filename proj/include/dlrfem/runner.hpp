/*! @file runner.hpp
 *  Runs configurations, writes output files and drives convergence studies.
 *
 *  Output directory: the environment variable DLRFEM_OUTPUT_DIR, when set,
 *  replaces RunConfig::output_dir.
 */
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dlrfem/diagnostics.hpp"
#include "dlrfem/dlr_solver.hpp"
#include "dlrfem/run_config.hpp"

namespace dlrfem {

inline constexpr const char* kOutputDirEnv = "DLRFEM_OUTPUT_DIR";
inline constexpr const char* kDiagnosticsHeader = "step,time,mass,energy,modified_energy,rank,odd_symmetry_error,wall_ms";
inline constexpr const char* kTraceHeader = "step,r_in,r_hat,r_bar,r_tilde,trunc_tail,wall_ms";
inline constexpr const char* kRatesHeader = "param,error,pairwise_order";

std::filesystem::path resolve_output_dir(const RunConfig& config);

std::string diagnostics_csv_row(const DiagnosticsRecord& r);
std::string trace_csv_row(const StepTrace& t);
std::string snapshot_file_name(double time);
//! Header line, then one row of n values per x node.
std::string snapshot_text(const Eigen::MatrixXd& W, const RunConfig& config, double time);

struct RunSummary {
  std::filesystem::path output_dir;
  std::vector<DiagnosticsRecord> records;
  std::vector<StepTrace> traces;
  Eigen::MatrixXd final_state;
};

//! Runs the configured solver and writes diagnostics.csv, trace.csv and snapshots.
//! A snapshot at final_time is written even when not requested.
RunSummary execute_run(const RunConfig& config, std::ostream& log);

//! Runs the configured solver without writing files; returns nodal values at T.
Eigen::MatrixXd final_nodal_values(const RunConfig& config);

enum class StudyAxis { Spatial, Temporal };
StudyAxis study_axis_from_string(const std::string& name);

struct RatesTable {
  StudyAxis axis = StudyAxis::Spatial;
  std::vector<double> params;   //!< h or tau per level
  std::vector<double> errors;   //!< ||w_level - w_ref||_M on the level's grid
  std::vector<double> pairwise; //!< empty when `exact`
  double slope = 0.0;           //!< NaN when `exact`
  bool exact = false;           //!< every error at rounding level
};

/*! Self-convergence study over `levels` >= 3 refinements of `base`.
 *
 *  Spatial: element counts double per level; the reference has one more
 *  doubling and is compared at the level's nodes. Temporal: tau halves per
 *  level; the reference uses tau_min / 8 on the same grid.
 */
RatesTable run_convergence_study(const RunConfig& base, StudyAxis axis, int levels);

std::string rates_csv(const RatesTable& table);

}  // namespace dlrfem
