#include "dlrfem/nonlinearity.hpp"

#include <cmath>
#include <vector>

#include "dlrfem/errors.hpp"
#include "hadamard.hpp"

namespace dlrfem {

namespace {

// Operands of N(A B^T) viewed from the side that is being tested.
struct Side {
  const Eigen::MatrixXd& A;        // p x R
  const Eigen::MatrixXd& B;        // s x R
  const Eigen::VectorXd& mleft;    // p
  const Eigen::VectorXd& mright;   // s
  double area;
};

void require_supported(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::Classical:
    case NonlinearityKind::ConservativeRSLM:
    case NonlinearityKind::ConservativeBBLM:
    case NonlinearityKind::Zero:
    case NonlinearityKind::Identity:
      return;
  }
  throw UnsupportedError("unknown nonlinearity variant");
}

double bblm_multiplier(const NonlinearScalars& sc, double area) {
  const double den = area - sc.quadratic;
  if (!(std::abs(den) >= kBblmDenominatorTol * area))
    throw DegenerateStateError("BBLM multiplier undefined: (1 - W^2, 1)_M = " + std::to_string(den));
  return (sc.mass - sc.cubic) / den;
}

// Column-wise weighted sums with a fixed reduction order.
double weighted_sum(const Eigen::MatrixXd& X, const Eigen::VectorXd& mx, const Eigen::VectorXd& my) {
  std::vector<double> partial(static_cast<std::size_t>(X.cols()));
  const Eigen::Index n = X.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) partial[static_cast<std::size_t>(j)] = my[j] * X.col(j).dot(mx);
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

Eigen::MatrixXd n_dense_impl(const Eigen::MatrixXd& W, NonlinearityKind kind, const Eigen::VectorXd& mx,
                             const Eigen::VectorXd& my, double area) {
  require_supported(kind);
  if (kind == NonlinearityKind::Zero) return Eigen::MatrixXd::Zero(W.rows(), W.cols());
  if (kind == NonlinearityKind::Identity) return W;
  Eigen::MatrixXd N(W.rows(), W.cols());
  const Eigen::Index n = W.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) N.col(j) = W.col(j) - W.col(j).cwiseProduct(W.col(j)).cwiseProduct(W.col(j));
  if (kind == NonlinearityKind::ConservativeRSLM) {
    const double c = weighted_sum(N, mx, my) / area;
    N.array() -= c;
  } else if (kind == NonlinearityKind::ConservativeBBLM) {
    const Eigen::MatrixXd g = (1.0 - W.array().square()).matrix();
    const double den = weighted_sum(g, mx, my);
    if (!(std::abs(den) >= kBblmDenominatorTol * area))
      throw DegenerateStateError("BBLM multiplier undefined: (1 - W^2, 1)_M = " + std::to_string(den));
    const double beta = weighted_sum(N, mx, my) / den;
    N -= beta * g;
  }
  return N;
}

NonlinearScalars scalars_of(const Side& sd) {
  NonlinearScalars sc;
  sc.mass = (sd.mleft.transpose() * sd.A) * (sd.B.transpose() * sd.mright);
  sc.quadratic = detail::hadamard_total(2, sd.A, sd.B, sd.mleft, sd.mright);
  sc.cubic = detail::hadamard_total(3, sd.A, sd.B, sd.mleft, sd.mright);
  return sc;
}

enum class Route { Factored, Dense };

// Operation counts of the two evaluation routes; `left` is the number of
// left test vectors (0 when the left side is not projected).
Route choose_route(KernelMode mode, const Side& sd, double right, double left) {
  if (mode == KernelMode::Factored) return Route::Factored;
  if (mode == KernelMode::Dense) return Route::Dense;
  const double p = static_cast<double>(sd.A.rows()), s = static_cast<double>(sd.B.rows());
  const double r = static_cast<double>(sd.A.cols());
  const double tuples = detail::triple_count(r) + detail::pair_count(r);
  const double factored = tuples * (3.0 * (p + s) + p * (left > 0 ? left : right) + s * right + left * right);
  const double dense = p * s * (r + 8.0 + right) + (left > 0 ? p * left * right : 0.0);
  return factored <= dense ? Route::Factored : Route::Dense;
}

// N(A B^T) M_right T.
Eigen::MatrixXd apply_side(const Side& sd, const Eigen::MatrixXd& T, NonlinearityKind kind, KernelMode mode) {
  require_supported(kind);
  if (T.rows() != sd.B.rows()) throw ContractViolation("nonlinear kernel: test matrix has wrong row count");
  const Eigen::MatrixXd Tw = sd.mright.asDiagonal() * T;
  if (kind == NonlinearityKind::Zero) return Eigen::MatrixXd::Zero(sd.A.rows(), T.cols());
  if (kind == NonlinearityKind::Identity) return sd.A * (sd.B.transpose() * Tw);

  if (choose_route(mode, sd, static_cast<double>(T.cols()), 0.0) == Route::Dense) {
    const Eigen::MatrixXd W = sd.A * sd.B.transpose();
    return n_dense_impl(W, kind, sd.mleft, sd.mright, sd.area) * Tw;
  }

  Eigen::MatrixXd out = sd.A * (sd.B.transpose() * Tw);
  out -= detail::hadamard_apply(3, sd.A, sd.B, Tw);
  if (kind == NonlinearityKind::Classical) return out;

  const NonlinearScalars sc = scalars_of(sd);
  const Eigen::RowVectorXd ones_t = Tw.colwise().sum();
  if (kind == NonlinearityKind::ConservativeRSLM) {
    out.rowwise() -= ((sc.mass - sc.cubic) / sd.area) * ones_t;
  } else {
    const double beta = bblm_multiplier(sc, sd.area);
    // (1 - W^2) M T = 1 (1^T M T) - W^{.2} M T
    out.rowwise() -= beta * ones_t;
    out += beta * detail::hadamard_apply(2, sd.A, sd.B, Tw);
  }
  return out;
}

}  // namespace

std::string to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::Classical: return "classical";
    case NonlinearityKind::ConservativeRSLM: return "rslm";
    case NonlinearityKind::ConservativeBBLM: return "bblm";
    case NonlinearityKind::Zero: return "linear";
    case NonlinearityKind::Identity: return "identity";
  }
  return "unknown";
}

NonlinearityKind nonlinearity_from_string(const std::string& name) {
  if (name == "classical") return NonlinearityKind::Classical;
  if (name == "rslm") return NonlinearityKind::ConservativeRSLM;
  if (name == "bblm") return NonlinearityKind::ConservativeBBLM;
  if (name == "linear") return NonlinearityKind::Zero;
  if (name == "identity") return NonlinearityKind::Identity;
  throw ConfigError("unknown variant '" + name + "' (expected classical, rslm, bblm or linear)");
}

std::string to_string(KernelMode mode) {
  switch (mode) {
    case KernelMode::Factored: return "factored";
    case KernelMode::Dense: return "dense";
    case KernelMode::Auto: return "auto";
  }
  return "unknown";
}

KernelMode kernel_mode_from_string(const std::string& name) {
  if (name == "factored") return KernelMode::Factored;
  if (name == "dense") return KernelMode::Dense;
  if (name == "auto") return KernelMode::Auto;
  throw ConfigError("unknown kernel mode '" + name + "' (expected factored, dense or auto)");
}

Eigen::MatrixXd n_dense(const Eigen::MatrixXd& W, NonlinearityKind kind, const TensorGrid2D& grid) {
  if (W.rows() != grid.rows() || W.cols() != grid.cols()) throw ContractViolation("n_dense: shape mismatch");
  return n_dense_impl(W, kind, grid.gx.mass_diag(), grid.gy.mass_diag(), grid.area());
}

NonlinearScalars n_scalars(const LowRankState& w, const TensorGrid2D& grid) {
  const Eigen::MatrixXd K = w.U * w.S;
  return scalars_of({K, w.V, grid.gx.mass_diag(), grid.gy.mass_diag(), grid.area()});
}

NonlinearScalars n_scalars_dense(const Eigen::MatrixXd& W, const TensorGrid2D& grid) {
  const Eigen::VectorXd& mx = grid.gx.mass_diag();
  const Eigen::VectorXd& my = grid.gy.mass_diag();
  NonlinearScalars sc;
  sc.mass = weighted_sum(W, mx, my);
  sc.quadratic = weighted_sum(W.array().square().matrix(), mx, my);
  sc.cubic = weighted_sum(W.array().cube().matrix(), mx, my);
  return sc;
}

Eigen::MatrixXd n_times_v(const LowRankState& w, const Eigen::MatrixXd& Vtest, NonlinearityKind kind,
                          const TensorGrid2D& grid, KernelMode mode) {
  if (w.U.rows() != grid.rows() || w.V.rows() != grid.cols()) throw ContractViolation("n_times_v: factor shape mismatch");
  const Eigen::MatrixXd K = w.U * w.S;
  return apply_side({K, w.V, grid.gx.mass_diag(), grid.gy.mass_diag(), grid.area()}, Vtest, kind, mode);
}

Eigen::MatrixXd n_transpose_times_u(const LowRankState& w, const Eigen::MatrixXd& Utest, NonlinearityKind kind,
                                    const TensorGrid2D& grid, KernelMode mode) {
  if (w.U.rows() != grid.rows() || w.V.rows() != grid.cols())
    throw ContractViolation("n_transpose_times_u: factor shape mismatch");
  // N commutes with transposition: N(W)^T = N(W^T) with W^T = (V S^T) U^T.
  const Eigen::MatrixXd L = w.V * w.S.transpose();
  return apply_side({L, w.U, grid.gy.mass_diag(), grid.gx.mass_diag(), grid.area()}, Utest, kind, mode);
}

Eigen::MatrixXd projected_n(const Eigen::MatrixXd& Ubar, const LowRankState& w, const Eigen::MatrixXd& Vbar,
                            NonlinearityKind kind, const TensorGrid2D& grid, KernelMode mode) {
  require_supported(kind);
  if (w.U.rows() != grid.rows() || w.V.rows() != grid.cols() || Ubar.rows() != grid.rows() || Vbar.rows() != grid.cols())
    throw ContractViolation("projected_n: factor shape mismatch");
  const Eigen::MatrixXd K = w.U * w.S;
  const Side sd{K, w.V, grid.gx.mass_diag(), grid.gy.mass_diag(), grid.area()};
  const Eigen::MatrixXd Lw = sd.mleft.asDiagonal() * Ubar;
  const Eigen::MatrixXd Tw = sd.mright.asDiagonal() * Vbar;

  if (kind == NonlinearityKind::Zero) return Eigen::MatrixXd::Zero(Ubar.cols(), Vbar.cols());
  if (kind == NonlinearityKind::Identity) return (Lw.transpose() * K) * (w.V.transpose() * Tw);

  if (choose_route(mode, sd, static_cast<double>(Vbar.cols()), static_cast<double>(Ubar.cols())) == Route::Dense) {
    const Eigen::MatrixXd W = K * w.V.transpose();
    return Lw.transpose() * n_dense_impl(W, kind, sd.mleft, sd.mright, sd.area) * Tw;
  }

  Eigen::MatrixXd out = (Lw.transpose() * K) * (w.V.transpose() * Tw);
  out -= detail::hadamard_project(3, Lw, K, w.V, Tw);
  if (kind == NonlinearityKind::Classical) return out;

  const NonlinearScalars sc = scalars_of(sd);
  const Eigen::MatrixXd ones_outer = Lw.colwise().sum().transpose() * Tw.colwise().sum();
  if (kind == NonlinearityKind::ConservativeRSLM) {
    out -= ((sc.mass - sc.cubic) / sd.area) * ones_outer;
  } else {
    const double beta = bblm_multiplier(sc, sd.area);
    out -= beta * ones_outer;
    out += beta * detail::hadamard_project(2, Lw, K, w.V, Tw);
  }
  return out;
}

int overshoot_count(const Eigen::MatrixXd& W) { return static_cast<int>((W.array().abs() > 1.0).count()); }

}  // namespace dlrfem
