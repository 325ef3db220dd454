#include "hadamard.hpp"

#include <algorithm>

#include "dlrfem/errors.hpp"

namespace dlrfem::detail {

namespace {

constexpr std::size_t kBlock = 256;

// Fill columns of Ahat and Bhat for tuples [t0, t1); mult folded into Bhat.
void build_block(const std::vector<IndexTuple>& tuples, std::size_t t0, std::size_t t1, int degree,
                 const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Eigen::MatrixXd& Ahat, Eigen::MatrixXd& Bhat) {
  const Eigen::Index nb = static_cast<Eigen::Index>(t1 - t0);
  Ahat.resize(A.rows(), nb);
  Bhat.resize(B.rows(), nb);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < nb; ++c) {
    const IndexTuple& t = tuples[t0 + static_cast<std::size_t>(c)];
    if (degree == 3) {
      Ahat.col(c) = A.col(t.i).cwiseProduct(A.col(t.j)).cwiseProduct(A.col(t.l));
      Bhat.col(c) = t.mult * B.col(t.i).cwiseProduct(B.col(t.j)).cwiseProduct(B.col(t.l));
    } else {
      Ahat.col(c) = A.col(t.i).cwiseProduct(A.col(t.j));
      Bhat.col(c) = t.mult * B.col(t.i).cwiseProduct(B.col(t.j));
    }
  }
}

std::vector<IndexTuple> tuples_for(int degree, int r) {
  if (degree == 3) return index_triples(r);
  if (degree == 2) return index_pairs(r);
  throw ContractViolation("hadamard expansion supports degree 2 or 3");
}

void check_factors(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.cols() != B.cols()) throw ContractViolation("hadamard expansion: factor widths differ");
}

}  // namespace

std::vector<IndexTuple> index_triples(int r) {
  std::vector<IndexTuple> out;
  out.reserve(static_cast<std::size_t>(triple_count(r)));
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j)
      for (int l = j; l < r; ++l) {
        const double mult = (i == j && j == l) ? 1.0 : (i == j || j == l) ? 3.0 : 6.0;
        out.push_back({i, j, l, mult});
      }
  return out;
}

std::vector<IndexTuple> index_pairs(int r) {
  std::vector<IndexTuple> out;
  out.reserve(static_cast<std::size_t>(pair_count(r)));
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j) out.push_back({i, j, j, i == j ? 1.0 : 2.0});
  return out;
}

Eigen::MatrixXd hadamard_apply(int degree, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                               const Eigen::MatrixXd& Tw) {
  check_factors(A, B);
  if (Tw.rows() != B.rows()) throw ContractViolation("hadamard_apply: test rows do not match right factor");
  const auto tuples = tuples_for(degree, static_cast<int>(A.cols()));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(A.rows(), Tw.cols());
  Eigen::MatrixXd Ahat, Bhat;
  for (std::size_t t0 = 0; t0 < tuples.size(); t0 += kBlock) {
    const std::size_t t1 = std::min(tuples.size(), t0 + kBlock);
    build_block(tuples, t0, t1, degree, A, B, Ahat, Bhat);
    out.noalias() += Ahat * (Bhat.transpose() * Tw);
  }
  return out;
}

Eigen::MatrixXd hadamard_project(int degree, const Eigen::MatrixXd& Lw, const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& B, const Eigen::MatrixXd& Tw) {
  check_factors(A, B);
  if (Lw.rows() != A.rows() || Tw.rows() != B.rows()) throw ContractViolation("hadamard_project: test shape mismatch");
  const auto tuples = tuples_for(degree, static_cast<int>(A.cols()));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(Lw.cols(), Tw.cols());
  Eigen::MatrixXd Ahat, Bhat;
  for (std::size_t t0 = 0; t0 < tuples.size(); t0 += kBlock) {
    const std::size_t t1 = std::min(tuples.size(), t0 + kBlock);
    build_block(tuples, t0, t1, degree, A, B, Ahat, Bhat);
    out.noalias() += (Lw.transpose() * Ahat) * (Bhat.transpose() * Tw);
  }
  return out;
}

double hadamard_total(int degree, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& wa,
                      const Eigen::VectorXd& wb) {
  check_factors(A, B);
  const auto tuples = tuples_for(degree, static_cast<int>(A.cols()));
  std::vector<double> terms(tuples.size());
  const long nt = static_cast<long>(tuples.size());
#pragma omp parallel for schedule(static)
  for (long c = 0; c < nt; ++c) {
    const IndexTuple& t = tuples[static_cast<std::size_t>(c)];
    double sa, sb;
    if (degree == 3) {
      sa = (A.col(t.i).cwiseProduct(A.col(t.j)).cwiseProduct(A.col(t.l))).dot(wa);
      sb = (B.col(t.i).cwiseProduct(B.col(t.j)).cwiseProduct(B.col(t.l))).dot(wb);
    } else {
      sa = (A.col(t.i).cwiseProduct(A.col(t.j))).dot(wa);
      sb = (B.col(t.i).cwiseProduct(B.col(t.j))).dot(wb);
    }
    terms[static_cast<std::size_t>(c)] = t.mult * sa * sb;
  }
  // Fixed summation order keeps results independent of the thread count.
  double total = 0.0;
  for (double v : terms) total += v;
  return total;
}

void square_factors(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Eigen::MatrixXd& A2, Eigen::MatrixXd& B2) {
  check_factors(A, B);
  const auto tuples = index_pairs(static_cast<int>(A.cols()));
  build_block(tuples, 0, tuples.size(), 2, A, B, A2, B2);
}

}  // namespace dlrfem::detail
