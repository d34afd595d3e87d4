#pragma once

#include <Eigen/Dense>

namespace spdc {

struct JacobiResult {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns match values
  int sweeps = 0;
  double off_norm = 0.0;
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. Sweeps until the
/// off-diagonal Frobenius norm drops below rel_tol * ||a||_F. Throws
/// ContractError for non-square or non-symmetric input and NumericalError
/// (with sweep count and residual off-norm) when max_sweeps is exhausted.
JacobiResult jacobi_eigen(const Eigen::MatrixXd& a, double rel_tol = 1e-12,
                          int max_sweeps = 100);

/// Singular values of a square matrix f, descending, from the eigenvalues of
/// the symmetric embedding [[0, f], [f^T, 0]] (which come in +-sigma pairs).
Eigen::VectorXd singular_values_by_embedding(const Eigen::MatrixXd& f);

}  // namespace spdc
