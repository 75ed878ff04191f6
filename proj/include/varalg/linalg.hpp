#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "varalg/errors.hpp"

namespace varalg {

// Full spectral decomposition of a symmetric matrix by cyclic Jacobi
// rotations. Eigenvalues ascending, eigenvector k in column k. Iterates until
// the off-diagonal Frobenius norm drops below 1e-12 * ||A||_F.
struct JacobiEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
JacobiEigen jacobi_eigen(const Eigen::MatrixXd& symmetric);

// Dense symmetric positive definite matrix with cached spectral data.
// Immutable once built (construct through make_spd); safe to share across
// concurrent tasks.
class SpdMatrix {
 public:
  int n() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  // Eigenvalues sorted ascending.
  const Eigen::VectorXd& spectrum() const { return spectrum_; }
  // Columns are eigenvectors matching spectrum().
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  double lambda_min() const { return spectrum_(0); }
  double lambda_max() const { return spectrum_(n() - 1); }
  // 1^t A 1 = Tr(A) + 2 sum_{i<j} a_ij.
  double ones_form() const { return ones_form_; }

 private:
  friend SpdMatrix make_spd(const Eigen::MatrixXd& raw);
  SpdMatrix() = default;

  Eigen::MatrixXd entries_;
  Eigen::VectorXd spectrum_;
  Eigen::MatrixXd eigenvectors_;
  double ones_form_ = 0.0;
};

// Validates and builds an SpdMatrix from a raw square array.
// Inputs symmetric to within 1e-9 relative are symmetrized as (A + A^t)/2.
// Throws NotSymmetric, NotPositiveDefinite (lambda_1 <= 1e-12 * lambda_n),
// DimensionMismatch (non-square), BadParams (non-finite entries).
SpdMatrix make_spd(const Eigen::MatrixXd& raw);

// Checks of the two-sided quadratic form bounds and the sup-norm bound
//   lambda_1 ||u||_2^2 <= u^t A u <= lambda_n ||u||_2^2,
//   ||u||_inf <= (u^t A u)^{1/2} / sqrt(lambda_1),
// each with slack 1e-10 * (1 + |u^t A u|).
struct NormBoundCheck {
  bool lower_ok;
  bool upper_ok;
  bool infnorm_ok;
  double quad_form;  // u^t A u, evaluated once
};
NormBoundCheck verify_norm_bounds(const SpdMatrix& A, const Eigen::VectorXd& u);

// Off-diagonal sign conditions:
//   a1: a_ij <= 0 for all i != j;
//   a2: a1 and every row i >= 2 has some j < i with a_ij < 0 (strict).
// Witness j_i is the smallest such column, recorded 1-based per row i = 2..n.
struct SignConditionVerdict {
  bool a1_holds;
  bool a2_holds;
  std::vector<std::optional<int>> a2_witnesses;  // entry r is row i = r + 2
};
SignConditionVerdict check_sign_conditions(const SpdMatrix& A);

// Solves A x = b through the cached symmetric factorization
// (||Ax - b||_2 <= 1e-10 * (1 + ||b||_2)). Throws DimensionMismatch.
Eigen::VectorXd solve_spd(const SpdMatrix& A, const Eigen::VectorXd& b);

}  // namespace varalg
