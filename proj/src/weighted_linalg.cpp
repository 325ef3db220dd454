#include "dlrfem/weighted_linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "dlrfem/errors.hpp"

namespace dlrfem {

namespace {

double mdot(const Eigen::VectorXd& mass, const Eigen::Ref<const Eigen::VectorXd>& a,
            const Eigen::Ref<const Eigen::VectorXd>& b) {
  return (a.cwiseProduct(mass)).dot(b);
}

// Two-pass modified Gram-Schmidt against the first `count` columns of Q.
// Coefficients are accumulated into `coeff` when given.
void orthogonalize(const Eigen::MatrixXd& Q, const std::vector<Eigen::Index>& cols, const Eigen::VectorXd& mass,
                   Eigen::VectorXd& v, Eigen::VectorXd* coeff) {
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const double c = mdot(mass, Q.col(cols[t]), v);
      v.noalias() -= c * Q.col(cols[t]);
      if (coeff) (*coeff)[static_cast<Eigen::Index>(t)] += c;
    }
}

struct MgsResult {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  std::vector<Eigen::Index> accepted;
  std::vector<Eigen::Index> deficient;
};

MgsResult weighted_mgs(const Eigen::MatrixXd& A, const Eigen::VectorXd& mass) {
  if (A.rows() != mass.size()) throw ContractViolation("weighted QR: row count does not match mass diagonal");
  if (!(mass.size() == 0 || mass.minCoeff() > 0.0)) throw ContractViolation("weighted QR: mass entries must be positive");
  const Eigen::Index p = A.rows(), q = A.cols();
  MgsResult out;
  out.Q = Eigen::MatrixXd::Zero(p, q);
  out.R = Eigen::MatrixXd::Zero(q, q);
  for (Eigen::Index j = 0; j < q; ++j) {
    Eigen::VectorXd v = A.col(j);
    if (!v.allFinite()) throw NumericError("weighted QR: input column " + std::to_string(j) + " is not finite");
    const double in_norm = std::sqrt(mdot(mass, v, v));
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.accepted.size()));
    orthogonalize(out.Q, out.accepted, mass, v, &coeff);
    for (std::size_t t = 0; t < out.accepted.size(); ++t) out.R(out.accepted[t], j) = coeff[static_cast<Eigen::Index>(t)];
    const double nv = std::sqrt(mdot(mass, v, v));
    if (static_cast<Eigen::Index>(out.accepted.size()) < p && nv > kGqrDropTol * (in_norm + 1.0)) {
      out.Q.col(j) = v / nv;
      out.R(j, j) = nv;
      out.accepted.push_back(j);
    } else {
      out.deficient.push_back(j);
    }
  }
  return out;
}

}  // namespace

double weighted_inner(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Grid1D& gx, const Grid1D& gy) {
  if (A.rows() != gx.size() || A.cols() != gy.size() || B.rows() != A.rows() || B.cols() != A.cols())
    throw ContractViolation("weighted_inner: shape mismatch");
  const Eigen::VectorXd& mx = gx.mass_diag();
  const Eigen::VectorXd& my = gy.mass_diag();
  double total = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    total += my[j] * (A.col(j).cwiseProduct(mx)).dot(B.col(j));
  return total;
}

double weighted_norm(const Eigen::MatrixXd& A, const Grid1D& gx, const Grid1D& gy) {
  return std::sqrt(std::max(0.0, weighted_inner(A, A, gx, gy)));
}

GqrResult gqr(const Eigen::MatrixXd& A, const Eigen::VectorXd& mass) {
  const Eigen::Index p = A.rows(), q = A.cols();
  if (p < q) throw ContractViolation("gqr: more columns than rows (" + std::to_string(q) + " > " + std::to_string(p) + ")");
  MgsResult mgs = weighted_mgs(A, mass);
  if (mgs.deficient.empty()) return {std::move(mgs.Q), std::move(mgs.R)};

  // Fill dependent slots with the canonical direction that survives
  // orthogonalisation best. Their R rows stay zero.
  std::vector<Eigen::Index> basis = mgs.accepted;
  for (Eigen::Index j : mgs.deficient) {
    double best = -1.0;
    Eigen::VectorXd best_v;
    for (Eigen::Index c = 0; c < p; ++c) {
      Eigen::VectorXd v = Eigen::VectorXd::Unit(p, c);
      orthogonalize(mgs.Q, basis, mass, v, nullptr);
      const double rel = std::sqrt(mdot(mass, v, v) / mass[c]);
      if (rel > best) {
        best = rel;
        best_v = std::move(v);
      }
    }
    mgs.Q.col(j) = best_v / std::sqrt(mdot(mass, best_v, best_v));
    basis.push_back(j);
  }
  return {std::move(mgs.Q), std::move(mgs.R)};
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& A, const Eigen::VectorXd& mass) {
  MgsResult mgs = weighted_mgs(A, mass);
  if (mgs.accepted.empty()) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Ones(A.rows(), 1);
    q /= std::sqrt(mass.sum());
    return q;
  }
  Eigen::MatrixXd Q(A.rows(), static_cast<Eigen::Index>(mgs.accepted.size()));
  for (std::size_t t = 0; t < mgs.accepted.size(); ++t) Q.col(static_cast<Eigen::Index>(t)) = mgs.Q.col(mgs.accepted[t]);
  return Q;
}

Spectrum::Spectrum(const Grid1D& grid) {
  sqrt_mass_ = grid.mass_diag().cwiseSqrt();
  const Eigen::VectorXd inv = sqrt_mass_.cwiseInverse();
  Eigen::MatrixXd B = -(inv.asDiagonal() * grid.stiffness() * inv.asDiagonal());
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
  if (eig.info() != Eigen::Success) throw NumericError("spectral factorisation of the stiffness operator failed");
  lambda_ = eig.eigenvalues();
  Q_ = eig.eigenvectors();
}

Propagator::Propagator(const Spectrum& spectrum, double s) : s_(s) {
  const Eigen::VectorXd expo = s * spectrum.eigenvalues();
  if (!std::isfinite(s) || expo.maxCoeff() > kMaxExponent)
    throw OverflowError("propagator exponent " + std::to_string(expo.maxCoeff()) + " exceeds " +
                        std::to_string(kMaxExponent) + " for step " + std::to_string(s));
  const Eigen::MatrixXd& Q = spectrum.eigenvectors();
  const Eigen::VectorXd& d = spectrum.sqrt_mass();
  const Eigen::MatrixXd scaled = Q * expo.array().exp().matrix().asDiagonal();
  E_ = d.cwiseInverse().asDiagonal() * (scaled * Q.transpose()) * d.asDiagonal();
}

Eigen::MatrixXd Propagator::apply(const Eigen::MatrixXd& X) const {
  if (X.rows() != E_.cols()) throw ContractViolation("propagator: row count mismatch");
  return E_ * X;
}

Propagator make_propagator(const Grid1D& grid, double s) { return Propagator(Spectrum(grid), s); }

PropagatorCache::PropagatorCache(const TensorGrid2D& grid) : sx_(grid.gx), sy_(grid.gy) {}

const PropagatorPair& PropagatorCache::get(double s) {
  for (const auto& entry : pairs_)
    if (entry.first == s) return entry.second;
  PropagatorPair pair{std::make_shared<const Propagator>(sx_, s), std::make_shared<const Propagator>(sy_, s)};
  pairs_.emplace_back(s, std::move(pair));
  return pairs_.back().second;
}

Eigen::MatrixXd apply_linear_step(const Eigen::MatrixXd& W, const PropagatorPair& props) {
  if (W.rows() != props.x->size() || W.cols() != props.y->size())
    throw ContractViolation("apply_linear_step: state shape does not match propagators");
  Eigen::MatrixXd tmp = props.x->matrix() * W;
  return tmp * props.y->matrix().transpose();
}

LowRankState apply_linear_step(const LowRankState& state, const PropagatorPair& props, const TensorGrid2D& grid) {
  GqrResult qx = gqr(props.x->apply(state.U), grid.gx.mass_diag());
  GqrResult qy = gqr(props.y->apply(state.V), grid.gy.mass_diag());
  LowRankState out;
  out.U = std::move(qx.Q);
  out.V = std::move(qy.Q);
  out.S = qx.R * state.S * qy.R.transpose();
  out.time = state.time;
  return out;
}

Truncation select_rank(const Eigen::VectorXd& sigma, const RankPolicy& policy) {
  const Eigen::Index n = sigma.size();
  if (n == 0) throw ContractViolation("select_rank: empty spectrum");
  // suffix[r] = l2 norm of sigma[r..n-1]
  Eigen::VectorXd suffix = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index i = n - 1; i >= 0; --i) suffix[i] = std::hypot(suffix[i + 1], sigma[i]);

  Truncation t;
  t.sigma = sigma;
  Eigen::Index r = 0;
  switch (policy.kind) {
    case RankPolicyKind::Fixed:
      if (policy.r_fixed < 1) throw ConfigError("fixed rank must be >= 1");
      r = std::min<Eigen::Index>(policy.r_fixed, n);
      break;
    case RankPolicyKind::AdaptiveAbsolute:
    case RankPolicyKind::AdaptiveRelative: {
      if (!(policy.tol >= 0.0)) throw ConfigError("truncation tolerance must be >= 0");
      t.eta = policy.kind == RankPolicyKind::AdaptiveAbsolute ? policy.tol : policy.tol * sigma[0];
      r = n;
      for (Eigen::Index c = 0; c <= n; ++c)
        if (suffix[c] <= t.eta) {
          r = c;
          break;
        }
      break;
    }
  }
  r = std::max<Eigen::Index>(r, 1);
  if (policy.r_max > 0 && r > policy.r_max) {
    r = policy.r_max;
    t.clamped = policy.kind != RankPolicyKind::Fixed;
  }
  t.rank = r;
  t.tail = suffix[r];
  return t;
}

Truncation truncate_s(const Eigen::MatrixXd& Sbar, const RankPolicy& policy) {
  if (!Sbar.allFinite()) throw NumericError("truncate_s: core matrix is not finite");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Sbar, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Truncation t = select_rank(svd.singularValues(), policy);
  t.R = svd.matrixU().leftCols(t.rank);
  t.P = svd.matrixV().leftCols(t.rank);
  t.S = svd.singularValues().head(t.rank).asDiagonal();
  return t;
}

LowRankState weighted_truncated_svd(const Eigen::MatrixXd& W, const TensorGrid2D& grid, const RankPolicy& policy,
                                    Truncation* info) {
  if (W.rows() != grid.rows() || W.cols() != grid.cols())
    throw ContractViolation("weighted_truncated_svd: shape mismatch");
  if (!W.allFinite()) throw NumericError("weighted_truncated_svd: input is not finite");
  const Eigen::VectorXd dx = grid.gx.mass_diag().cwiseSqrt();
  const Eigen::VectorXd dy = grid.gy.mass_diag().cwiseSqrt();
  const Eigen::MatrixXd Wt = dx.asDiagonal() * W * dy.asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Wt, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Truncation t = select_rank(svd.singularValues(), policy);
  LowRankState out;
  out.U = dx.cwiseInverse().asDiagonal() * svd.matrixU().leftCols(t.rank);
  out.V = dy.cwiseInverse().asDiagonal() * svd.matrixV().leftCols(t.rank);
  out.S = svd.singularValues().head(t.rank).asDiagonal();
  if (info) *info = std::move(t);
  return out;
}

}  // namespace dlrfem
