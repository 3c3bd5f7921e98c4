#pragma once

#include <Eigen/Dense>

namespace aninorm {

using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Largest eigenvalue modulus of a square matrix. Zero for the empty matrix.
double spectral_radius(const Matrix& M);

/// Largest singular value; zero for empty matrices.
double max_singular_value(const Matrix& M);
double max_singular_value(const ComplexMatrix& M);

/// Solves the Stein equation X = A X Aᵀ + Q for stable A.
///
/// Small problems (n <= 10) are solved exactly through the Kronecker form
/// (I - A⊗A) vec X = vec Q; larger ones by the squared-A doubling recurrence.
/// When Q is symmetric the result is symmetrized. Throws StabilityError if
/// spectral_radius(A) >= 1.
Matrix solve_stein(const Matrix& A, const Matrix& Q);

/// ln det M for symmetric positive definite M, from the Cholesky factor.
/// Throws NotPositiveDefinite otherwise.
double logdet_pd(const Matrix& M);

/// ln det(I - M) for symmetric M with I - M positive definite. Computed from
/// the eigenvalues of M with log1p so small perturbations of the identity
/// keep full relative precision.
double logdet_identity_minus(const Matrix& M);

double min_eigenvalue_symmetric(const Matrix& M);
double max_eigenvalue_symmetric(const Matrix& M);

bool all_finite(const Matrix& M);

inline Matrix symmetrized(const Matrix& M) { return 0.5 * (M + M.transpose()); }

void require_square(const Matrix& M, const char* what);
void require_finite(const Matrix& M, const char* what);

}  // namespace aninorm
