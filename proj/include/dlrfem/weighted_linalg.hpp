/*! @file weighted_linalg.hpp
 *  Linear algebra in the lumped-mass inner products.
 *
 *  All orthonormality statements refer to the diagonal mass of a grid:
 *  Q^T M Q = I.
 */
#pragma once

#include <Eigen/Dense>
#include <deque>
#include <limits>
#include <memory>

#include "dlrfem/mesh_basis.hpp"
#include "dlrfem/state.hpp"

namespace dlrfem {

//! (A, B)_M = sum_ij mx_i A_ij my_j B_ij.
double weighted_inner(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Grid1D& gx, const Grid1D& gy);
double weighted_norm(const Eigen::MatrixXd& A, const Grid1D& gx, const Grid1D& gy);

struct GqrResult {
  Eigen::MatrixXd Q;  //!< p x q, Q^T M Q = I
  Eigen::MatrixXd R;  //!< q x q upper triangular, A = Q R
};

//! Relative threshold below which a projected column counts as dependent.
inline constexpr double kGqrDropTol = 1e-12;

/*! M-orthonormal QR by modified Gram-Schmidt with one re-orthogonalisation.
 *
 *  Requires p >= q. A dependent column keeps a zero row in R and its slot in
 *  Q is filled with a canonical basis vector orthogonalised against the rest,
 *  so Q always has q orthonormal columns.
 */
GqrResult gqr(const Eigen::MatrixXd& A, const Eigen::VectorXd& mass);

/*! M-orthonormal basis of range(A), in column order, dependent columns dropped.
 *
 *  Returns at most min(p, q) columns and at least one.
 */
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& A, const Eigen::VectorXd& mass);

/*! Spectral factorisation of L = -M^{-1} A on one grid.
 *
 *  B = -M^{-1/2} A M^{-1/2} = Q diag(lambda) Q^T with lambda <= 0 (up to rounding).
 */
class Spectrum {
 public:
  explicit Spectrum(const Grid1D& grid);
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  const Eigen::MatrixXd& eigenvectors() const { return Q_; }
  const Eigen::VectorXd& sqrt_mass() const { return sqrt_mass_; }

 private:
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd Q_;
  Eigen::VectorXd sqrt_mass_;
};

//! Largest exponent s*lambda accepted before reporting overflow.
inline constexpr double kMaxExponent = 700.0;

//! Dense e^{sL} for one grid; s may be negative.
class Propagator {
 public:
  Propagator(const Spectrum& spectrum, double s);
  double step() const { return s_; }
  Eigen::Index size() const { return E_.rows(); }
  const Eigen::MatrixXd& matrix() const { return E_; }
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;

 private:
  double s_;
  Eigen::MatrixXd E_;
};

Propagator make_propagator(const Grid1D& grid, double s);

//! e^{s_x L_x} and e^{s_y L_y} applied on the two sides of W.
struct PropagatorPair {
  std::shared_ptr<const Propagator> x;
  std::shared_ptr<const Propagator> y;
};

/*! Caches spectra per grid axis and propagator pairs per step s.
 *
 *  Bound to one TensorGrid2D for its lifetime. References returned by get()
 *  stay valid while the cache lives.
 */
class PropagatorCache {
 public:
  explicit PropagatorCache(const TensorGrid2D& grid);
  const PropagatorPair& get(double s);
  std::size_t size() const { return pairs_.size(); }

 private:
  Spectrum sx_;
  Spectrum sy_;
  std::deque<std::pair<double, PropagatorPair>> pairs_;  // deque: get() references stay valid
};

//! W' = e^{sL_x} W (e^{sL_y})^T.
Eigen::MatrixXd apply_linear_step(const Eigen::MatrixXd& W, const PropagatorPair& props);

//! Exact low-rank linear step: [U',R] = gqr(e^{sL_x}U), [V',P] = gqr(e^{sL_y}V), S' = R S P^T.
LowRankState apply_linear_step(const LowRankState& state, const PropagatorPair& props, const TensorGrid2D& grid);

enum class RankPolicyKind { Fixed, AdaptiveAbsolute, AdaptiveRelative };

/*! Rank selection rule.
 *
 *  Fixed keeps min(r_fixed, available). The adaptive kinds keep the smallest
 *  rank whose discarded singular values have l2 norm <= eta, where eta is
 *  `tol` (absolute) or tol * sigma_1 (relative). The result is clamped to
 *  [1, r_max]; r_max <= 0 means no cap.
 */
struct RankPolicy {
  RankPolicyKind kind = RankPolicyKind::AdaptiveRelative;
  int r_fixed = 0;
  double tol = 0.0;
  int r_max = 0;

  static RankPolicy fixed(int r) { return {RankPolicyKind::Fixed, r, 0.0, 0}; }
  static RankPolicy absolute(double eta, int r_max = 0) { return {RankPolicyKind::AdaptiveAbsolute, 0, eta, r_max}; }
  static RankPolicy relative(double c, int r_max = 0) { return {RankPolicyKind::AdaptiveRelative, 0, c, r_max}; }
};

struct Truncation {
  Eigen::MatrixXd R;      //!< rows(Sbar) x rank, orthonormal columns
  Eigen::MatrixXd S;      //!< rank x rank diagonal
  Eigen::MatrixXd P;      //!< cols(Sbar) x rank, orthonormal columns
  Eigen::VectorXd sigma;  //!< all singular values of Sbar, descending
  Eigen::Index rank = 0;
  double tail = 0.0;      //!< l2 norm of the discarded singular values
  double eta = 0.0;       //!< threshold in effect (0 for the fixed policy)
  bool clamped = false;   //!< adaptive choice exceeded r_max
};

//! Rank chosen by `policy` for the descending singular values `sigma`.
Truncation select_rank(const Eigen::VectorXd& sigma, const RankPolicy& policy);

//! SVD of a small core matrix followed by rank selection.
Truncation truncate_s(const Eigen::MatrixXd& Sbar, const RankPolicy& policy);

//! Weighted SVD W = U S V^T with M-orthonormal factors, truncated by `policy`.
LowRankState weighted_truncated_svd(const Eigen::MatrixXd& W, const TensorGrid2D& grid, const RankPolicy& policy,
                                    Truncation* info = nullptr);

}  // namespace dlrfem
