#pragma once

#include "bslmis/common.hpp"

namespace bslmis {

// Smallest-eigenvalue tolerance used by every covariance guard, relative to
// the largest eigenvalue magnitude.
inline constexpr double kEigenTolerance = 1e-12;

// Cholesky factor of a symmetric positive-definite matrix. Throws
// FactorizationError when the matrix is not numerically PD.
Eigen::LLT<Matrix> cholesky(const Matrix& a, const char* what = "matrix");

double log_det_spd(const Eigen::LLT<Matrix>& llt);

// Symmetric PSD square root via eigendecomposition. Eigenvalues in
// [-tol * max|lambda|, 0) are clamped to zero; more negative ones throw.
Matrix sym_sqrt(const Matrix& a);
Matrix sym_inv_sqrt(const Matrix& a);

double min_eigenvalue(const Matrix& a);

// Sample covariance with divisor (rows - 1); rows are observations.
Matrix sample_cov(const Matrix& rows);

}  // namespace bslmis
