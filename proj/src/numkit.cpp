#include "aninorm/numkit.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "aninorm/errors.hpp"

namespace aninorm {

namespace {

// Kronecker-form Stein solve is used up to this state dimension.
constexpr Index kSteinDirectMaxStates = 10;
constexpr int kSteinDoublingMaxSteps = 64;

Matrix solve_stein_direct(const Matrix& A, const Matrix& Q) {
  const Index n = A.rows();
  const Index nn = n * n;
  const Matrix K = Matrix::Identity(nn, nn) - Eigen::kroneckerProduct(A, A).eval();
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(Q.data(), nn);
  const Eigen::VectorXd x = K.partialPivLu().solve(rhs);
  return Eigen::Map<const Matrix>(x.data(), n, n);
}

Matrix solve_stein_doubling(const Matrix& A, const Matrix& Q) {
  Matrix X = Q;
  Matrix Ak = A;
  for (int k = 0; k < kSteinDoublingMaxSteps; ++k) {
    const Matrix increment = Ak * X * Ak.transpose();
    X += increment;
    if (increment.norm() <= std::numeric_limits<double>::epsilon() * X.norm()) break;
    Ak = (Ak * Ak).eval();
  }
  return X;
}

}  // namespace

void require_square(const Matrix& M, const char* what) {
  if (M.rows() != M.cols()) {
    throw NotSquare(std::string(what) + ": expected a square matrix, got " +
                    std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
  }
}

void require_finite(const Matrix& M, const char* what) {
  if (!all_finite(M)) throw NonFiniteInput(std::string(what) + ": non-finite entry");
}

bool all_finite(const Matrix& M) { return M.size() == 0 || M.allFinite(); }

double spectral_radius(const Matrix& M) {
  require_square(M, "spectral_radius");
  require_finite(M, "spectral_radius");
  if (M.rows() == 0) return 0.0;
  if (M.rows() == 1) return std::abs(M(0, 0));
  Eigen::EigenSolver<Matrix> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error("spectral_radius: eigenvalue iteration did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double max_singular_value(const Matrix& M) {
  require_finite(M, "max_singular_value");
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

double max_singular_value(const ComplexMatrix& M) {
  if (M.size() == 0) return 0.0;
  if (!M.allFinite()) throw NonFiniteInput("max_singular_value: non-finite entry");
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  return svd.singularValues()(0);
}

Matrix solve_stein(const Matrix& A, const Matrix& Q) {
  require_square(A, "solve_stein");
  require_square(Q, "solve_stein");
  if (Q.rows() != A.rows()) throw DimensionError("solve_stein: A and Q sizes differ");
  require_finite(Q, "solve_stein");
  if (A.rows() == 0) return Q;
  if (spectral_radius(A) >= 1.0) {
    throw StabilityError("solve_stein: A is not Schur stable");
  }
  Matrix X = A.rows() <= kSteinDirectMaxStates ? solve_stein_direct(A, Q)
                                                : solve_stein_doubling(A, Q);
  const double asymmetry = (Q - Q.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry <= 1e-14 * (1.0 + Q.cwiseAbs().maxCoeff())) X = symmetrized(X);
  return X;
}

double logdet_pd(const Matrix& M) {
  require_square(M, "logdet_pd");
  require_finite(M, "logdet_pd");
  if (M.rows() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("logdet_pd: matrix is not positive definite");
  }
  const auto diag = llt.matrixLLT().diagonal();
  if ((diag.array() <= 0.0).any()) {
    throw NotPositiveDefinite("logdet_pd: non-positive Cholesky pivot");
  }
  return 2.0 * diag.array().log().sum();
}

double logdet_identity_minus(const Matrix& M) {
  require_square(M, "logdet_identity_minus");
  require_finite(M, "logdet_identity_minus");
  if (M.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(M), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd mu = solver.eigenvalues();
  if (mu.maxCoeff() >= 1.0) {
    throw NotPositiveDefinite("logdet_identity_minus: I - M is not positive definite");
  }
  double sum = 0.0;
  for (Index i = 0; i < mu.size(); ++i) sum += std::log1p(-mu(i));
  return sum;
}

double min_eigenvalue_symmetric(const Matrix& M) {
  require_square(M, "min_eigenvalue_symmetric");
  if (M.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(M), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double max_eigenvalue_symmetric(const Matrix& M) {
  require_square(M, "max_eigenvalue_symmetric");
  if (M.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(M), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

}  // namespace aninorm
