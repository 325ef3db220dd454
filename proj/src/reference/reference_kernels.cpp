#include "dlrfem/reference_kernels.hpp"

#include <cmath>

#include "dlrfem/errors.hpp"

namespace dlrfem::reference {

namespace {

double area_of(const TensorGrid2D& grid) {
  double ax = 0.0, ay = 0.0;
  for (Eigen::Index i = 0; i < grid.rows(); ++i) ax += grid.gx.mass_diag()[i];
  for (Eigen::Index j = 0; j < grid.cols(); ++j) ay += grid.gy.mass_diag()[j];
  return ax * ay;
}

// Scalars of A B^T with left weights ml and right weights mr.
NonlinearScalars scalars(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& ml,
                         const Eigen::VectorXd& mr) {
  const Eigen::Index r = A.cols();
  NonlinearScalars sc;
  for (Eigen::Index i = 0; i < r; ++i) {
    double a1 = 0.0, b1 = 0.0;
    for (Eigen::Index p = 0; p < A.rows(); ++p) a1 += ml[p] * A(p, i);
    for (Eigen::Index q = 0; q < B.rows(); ++q) b1 += mr[q] * B(q, i);
    sc.mass += a1 * b1;
    for (Eigen::Index j = 0; j < r; ++j) {
      double a2 = 0.0, b2 = 0.0;
      for (Eigen::Index p = 0; p < A.rows(); ++p) a2 += ml[p] * A(p, i) * A(p, j);
      for (Eigen::Index q = 0; q < B.rows(); ++q) b2 += mr[q] * B(q, i) * B(q, j);
      sc.quadratic += a2 * b2;
      for (Eigen::Index l = 0; l < r; ++l) {
        double a3 = 0.0, b3 = 0.0;
        for (Eigen::Index p = 0; p < A.rows(); ++p) a3 += ml[p] * A(p, i) * A(p, j) * A(p, l);
        for (Eigen::Index q = 0; q < B.rows(); ++q) b3 += mr[q] * B(q, i) * B(q, j) * B(q, l);
        sc.cubic += a3 * b3;
      }
    }
  }
  return sc;
}

// N(A B^T) diag(mr) T, every ordered triple visited.
Eigen::MatrixXd apply(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& ml,
                      const Eigen::VectorXd& mr, double area, const Eigen::MatrixXd& T, NonlinearityKind kind) {
  const Eigen::Index p = A.rows(), s = B.rows(), q = T.cols(), r = A.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, q);
  if (kind == NonlinearityKind::Zero) return out;
  std::vector<double> coef(static_cast<std::size_t>(q));
  auto accumulate = [&](const std::vector<Eigen::Index>& idx, double sign) {
    for (Eigen::Index c = 0; c < q; ++c) {
      double v = 0.0;
      for (Eigen::Index b = 0; b < s; ++b) {
        double prod = mr[b] * T(b, c);
        for (Eigen::Index i : idx) prod *= B(b, i);
        v += prod;
      }
      coef[static_cast<std::size_t>(c)] = v;
    }
    for (Eigen::Index a = 0; a < p; ++a) {
      double prod = sign;
      for (Eigen::Index i : idx) prod *= A(a, i);
      for (Eigen::Index c = 0; c < q; ++c) out(a, c) += prod * coef[static_cast<std::size_t>(c)];
    }
  };
  for (Eigen::Index i = 0; i < r; ++i) accumulate({i}, 1.0);
  if (kind == NonlinearityKind::Identity) return out;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j)
      for (Eigen::Index l = 0; l < r; ++l) accumulate({i, j, l}, -1.0);
  if (kind == NonlinearityKind::Classical) return out;

  const NonlinearScalars sc = scalars(A, B, ml, mr);
  double beta = (sc.mass - sc.cubic) / area;
  if (kind == NonlinearityKind::ConservativeBBLM) {
    const double den = area - sc.quadratic;
    if (!(std::abs(den) >= kBblmDenominatorTol * area)) throw DegenerateStateError("BBLM denominator vanishes");
    beta = (sc.mass - sc.cubic) / den;
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < r; ++j) accumulate({i, j}, beta);
  }
  for (Eigen::Index c = 0; c < q; ++c) {
    double colsum = 0.0;
    for (Eigen::Index b = 0; b < s; ++b) colsum += mr[b] * T(b, c);
    for (Eigen::Index a = 0; a < p; ++a) out(a, c) -= beta * colsum;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd n_dense(const Eigen::MatrixXd& W, NonlinearityKind kind, const TensorGrid2D& grid) {
  const Eigen::Index m = W.rows(), n = W.cols();
  Eigen::MatrixXd N(m, n);
  if (kind == NonlinearityKind::Zero) return Eigen::MatrixXd::Zero(m, n);
  if (kind == NonlinearityKind::Identity) return W;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) N(i, j) = W(i, j) - W(i, j) * W(i, j) * W(i, j);
  if (kind == NonlinearityKind::Classical) return N;
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = grid.gx.mass_diag()[i] * grid.gy.mass_diag()[j];
      num += w * N(i, j);
      den += w * (1.0 - W(i, j) * W(i, j));
    }
  const double area = area_of(grid);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      N(i, j) -= kind == NonlinearityKind::ConservativeRSLM ? num / area : (num / den) * (1.0 - W(i, j) * W(i, j));
  return N;
}

NonlinearScalars n_scalars(const LowRankState& w, const TensorGrid2D& grid) {
  return scalars(w.U * w.S, w.V, grid.gx.mass_diag(), grid.gy.mass_diag());
}

Eigen::MatrixXd n_times_v(const LowRankState& w, const Eigen::MatrixXd& Vtest, NonlinearityKind kind,
                          const TensorGrid2D& grid) {
  return apply(w.U * w.S, w.V, grid.gx.mass_diag(), grid.gy.mass_diag(), area_of(grid), Vtest, kind);
}

Eigen::MatrixXd n_transpose_times_u(const LowRankState& w, const Eigen::MatrixXd& Utest, NonlinearityKind kind,
                                    const TensorGrid2D& grid) {
  return apply(w.V * w.S.transpose(), w.U, grid.gy.mass_diag(), grid.gx.mass_diag(), area_of(grid), Utest, kind);
}

Eigen::MatrixXd projected_n(const Eigen::MatrixXd& Ubar, const LowRankState& w, const Eigen::MatrixXd& Vbar,
                            NonlinearityKind kind, const TensorGrid2D& grid) {
  const Eigen::MatrixXd X = reference::n_times_v(w, Vbar, kind, grid);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(Ubar.cols(), Vbar.cols());
  for (Eigen::Index a = 0; a < Ubar.cols(); ++a)
    for (Eigen::Index c = 0; c < Vbar.cols(); ++c)
      for (Eigen::Index i = 0; i < Ubar.rows(); ++i) out(a, c) += Ubar(i, a) * grid.gx.mass_diag()[i] * X(i, c);
  return out;
}

Eigen::MatrixXd linear_step(const Eigen::MatrixXd& W, const Eigen::MatrixXd& Ex, const Eigen::MatrixXd& Ey) {
  const Eigen::Index m = W.rows(), n = W.cols();
  Eigen::MatrixXd tmp = Eigen::MatrixXd::Zero(m, n), out = Eigen::MatrixXd::Zero(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < m; ++k) {
      const double e = Ex(i, k);
      for (Eigen::Index j = 0; j < n; ++j) tmp(i, j) += e * W(k, j);
    }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) v += tmp(i, k) * Ey(j, k);
      out(i, j) = v;
    }
  return out;
}

}  // namespace dlrfem::reference
