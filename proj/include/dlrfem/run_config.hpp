/*! @file run_config.hpp
 *  Everything needed to reproduce one run.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlrfem/mesh_basis.hpp"
#include "dlrfem/nonlinearity.hpp"
#include "dlrfem/weighted_linalg.hpp"

namespace dlrfem {

//! Element degrees accepted in a run configuration.
inline constexpr int kMaxConfigDegree = 4;

enum class SolverKind {
  FullRank,  //!< dense Strang splitting
  Dlr2,      //!< second-order low-rank Strang step with augmented Galerkin update
  DlrLie,    //!< first-order Lie-Trotter low-rank step
};

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);
std::string to_string(RankPolicyKind kind);
RankPolicyKind rank_policy_from_string(const std::string& name);

/*! Initial condition.
 *
 *  `kind` is one of the named fields listed by initial_condition_names() or
 *  "expression", in which case `expression` is parsed in x and y.
 */
struct InitialCondition {
  std::string kind = "sin-sin";
  std::string expression;
  double radius = 0.19;                               //!< kiss-bubble radius
  std::vector<double> centers = {0.0, -0.2, 0.0, 0.2};  //!< kiss-bubble x1,y1,x2,y2

  bool operator==(const InitialCondition&) const = default;
};

std::vector<std::string> initial_condition_names();

struct RunConfig {
  NonlinearityKind variant = NonlinearityKind::Classical;
  double epsilon = 0.01;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  InitialCondition initial;

  int degree = 1;
  int elements_x = 16;
  int elements_y = 16;

  double tau = 0.01;
  double final_time = 1.0;

  SolverKind solver = SolverKind::FullRank;
  RankPolicy rank_policy = RankPolicy::relative(0.01);
  KernelMode kernel = KernelMode::Auto;
  //! Step size above which conservative runs warn; unset means no warning.
  std::optional<double> tau_bound;
  //! Reserved; no solver path draws random numbers.
  std::uint64_t seed = 0;

  std::string output_dir = "output";
  int diagnostics_every = 1;
  std::vector<double> snapshot_times;
  bool symmetry_diagnostic = true;
  bool write_trace = true;

  bool operator==(const RunConfig& o) const;
};

//! Grid described by the configuration.
TensorGrid2D make_grid(const RunConfig& config);

//! Initial condition evaluated pointwise; throws ConfigError if unparsable.
ScalarField make_initial_field(const RunConfig& config);

//! Validates ranges and combinations; throws ConfigError naming the field.
void validate(const RunConfig& config);

}  // namespace dlrfem
