#include "dlrfem/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "dlrfem/errors.hpp"

namespace dlrfem {

TimeSchedule::TimeSchedule(double tau, double final_time, std::vector<double> stops) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("time step must be positive");
  if (!(final_time >= 0.0) || !std::isfinite(final_time)) throw ConfigError("final time must be >= 0");
  std::erase_if(stops, [&](double s) { return !(s > 0.0) || s >= final_time; });
  stops.push_back(final_time);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  if (final_time == 0.0) return;

  // Relative slack so that T = n*tau does not spawn a sliver step.
  const double slack = 1e-9 * tau;
  // Regular steps use tau exactly so the propagator cache sees a single key;
  // positions are recomputed from the step count to avoid drift.
  std::size_t next = 0;
  long n = 0;
  double t = 0.0;
  bool aligned = true;
  while (next < stops.size()) {
    const double target = stops[next];
    const double nominal = static_cast<double>(n + 1) * tau;
    if (nominal >= target - slack) {
      const bool exact = std::abs(nominal - target) <= slack;
      steps_.push_back({t, target, (exact && aligned) ? tau : target - t, true});
      t = target;
      ++next;
      if (exact) {
        ++n;
        aligned = true;
      } else {
        n = static_cast<long>(std::floor(target / tau + 1e-9));
        aligned = false;
      }
    } else {
      steps_.push_back({t, nominal, aligned ? tau : nominal - t, false});
      t = nominal;
      ++n;
      aligned = true;
    }
  }
}

}  // namespace dlrfem
