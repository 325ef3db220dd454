/*! @file schedule.hpp
 *  Step schedule and observer hooks shared by the full-rank and low-rank runs.
 */
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dlrfem/diagnostics.hpp"

namespace dlrfem {

/*! Steps of nominal size tau from 0 to T.
 *
 *  A step is shortened when it would pass the next stop (a snapshot time or
 *  T), so every stop is hit exactly. After an off-grid stop the following step
 *  ends on the next multiple of tau, so all other steps have size tau exactly.
 */
class TimeSchedule {
 public:
  TimeSchedule(double tau, double final_time, std::vector<double> stops = {});

  struct Step {
    double t0;
    double t1;  //!< exact end time; equals a stop when ends_at_stop
    double dt;
    bool ends_at_stop;
  };
  const std::vector<Step>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }

 private:
  std::vector<Step> steps_;
};

struct RunHooks {
  //! Called with the requested time and the nodal values at that time.
  std::function<void(double, const Eigen::MatrixXd&)> on_snapshot;
  std::function<void(const DiagnosticsRecord&)> on_record;
};

}  // namespace dlrfem
