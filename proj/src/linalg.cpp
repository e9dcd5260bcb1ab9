#include "bslmis/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bslmis {

Eigen::LLT<Matrix> cholesky(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw FactorizationError(std::string(what) + " must be square and non-empty");
  }
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw FactorizationError(std::string(what) + " is not positive-definite");
  }
  const auto diag = llt.matrixL().toDenseMatrix().diagonal();
  if (!diag.allFinite() || diag.minCoeff() <= 0.0) {
    throw FactorizationError(std::string(what) + " is not positive-definite");
  }
  return llt;
}

double log_det_spd(const Eigen::LLT<Matrix>& llt) {
  const Matrix& l = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> eigen_checked(const Matrix& a,
                                                    Vector& clamped) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DomainError("square root requires a non-empty square matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  if (es.info() != Eigen::Success) {
    throw FactorizationError("eigendecomposition failed");
  }
  clamped = es.eigenvalues();
  const double scale = std::max(1.0, clamped.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < clamped.size(); ++i) {
    if (clamped(i) < -kEigenTolerance * scale) {
      throw DomainError("matrix has a negative eigenvalue " +
                        std::to_string(clamped(i)));
    }
    clamped(i) = std::max(clamped(i), 0.0);
  }
  return es;
}

}  // namespace

Matrix sym_sqrt(const Matrix& a) {
  Vector ev;
  auto es = eigen_checked(a, ev);
  const Matrix& u = es.eigenvectors();
  return u * ev.cwiseSqrt().asDiagonal() * u.transpose();
}

Matrix sym_inv_sqrt(const Matrix& a) {
  Vector ev;
  auto es = eigen_checked(a, ev);
  const double scale = ev.maxCoeff();
  if (ev.minCoeff() <= kEigenTolerance * scale || scale <= 0.0) {
    throw FactorizationError("inverse square root of a singular matrix");
  }
  const Matrix& u = es.eigenvectors();
  return u * ev.cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose();
}

double min_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix sample_cov(const Matrix& rows) {
  if (rows.rows() < 2) throw DomainError("sample covariance needs >= 2 rows");
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Matrix centered = rows.rowwise() - mean;
  Matrix cov = centered.transpose() * centered /
               static_cast<double>(rows.rows() - 1);
  return 0.5 * (cov + cov.transpose());
}

}  // namespace bslmis
