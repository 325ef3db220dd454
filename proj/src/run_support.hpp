// Pieces shared by fr_run and dlr_run.
#pragma once

#include <chrono>
#include <optional>

#include "dlrfem/diagnostics.hpp"
#include "dlrfem/run_config.hpp"
#include "dlrfem/schedule.hpp"

namespace dlrfem::detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

//! Builds diagnostics records for one run.
class RecordMaker {
 public:
  RecordMaker(const RunConfig& config, const TensorGrid2D& grid, PropagatorCache& cache);
  DiagnosticsRecord make(int step, double time, const Eigen::MatrixXd& W, int rank, double wall_ms) const;
  bool due(int step, bool last) const;

 private:
  const RunConfig& config_;
  const TensorGrid2D& grid_;
  PropagatorPair half_;
  std::optional<ModifiedEnergy> modified_;
};

//! Warns on stderr when tau exceeds the stability bound of the variant.
void warn_on_step_size(const RunConfig& config);

bool is_snapshot_time(const RunConfig& config, double t);

}  // namespace dlrfem::detail
