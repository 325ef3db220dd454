// Hadamard-product expansions of (A B^T)^{.2} and (A B^T)^{.3}.
//
// With W = A B^T, W^{.3} = sum over i<=j<=l of mult * (A_i.A_j.A_l)(B_i.B_j.B_l)^T,
// mult in {1, 3, 6}; W^{.2} likewise over i<=j with mult in {1, 2}.
// Triples are processed in fixed-size blocks so memory stays O((p+s) * block).
#pragma once

#include <Eigen/Dense>
#include <vector>

namespace dlrfem::detail {

struct IndexTuple {
  int i, j, l;
  double mult;
};

std::vector<IndexTuple> index_triples(int r);
std::vector<IndexTuple> index_pairs(int r);

inline double triple_count(double r) { return r * (r + 1.0) * (r + 2.0) / 6.0; }
inline double pair_count(double r) { return r * (r + 1.0) / 2.0; }

//! (A B^T)^{.d} Tw for d = 2 or 3.
Eigen::MatrixXd hadamard_apply(int degree, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Tw);

//! Lw^T (A B^T)^{.d} Tw.
Eigen::MatrixXd hadamard_project(int degree, const Eigen::MatrixXd& Lw, const Eigen::MatrixXd& A,
                                 const Eigen::MatrixXd& B, const Eigen::MatrixXd& Tw);

//! wa^T (A B^T)^{.d} wb.
double hadamard_total(int degree, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& wa,
                      const Eigen::VectorXd& wb);

//! (A B^T)^{.2} as factors (A2, B2) of width r(r+1)/2, multiplicities folded into B2.
void square_factors(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, Eigen::MatrixXd& A2, Eigen::MatrixXd& B2);

}  // namespace dlrfem::detail
