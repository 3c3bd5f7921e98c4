#include "aninorm/riccati.hpp"

#include <cmath>
#include <string>

#include "aninorm/errors.hpp"

namespace aninorm {

namespace {

// Everything about a candidate R that the equation needs: Σ^{-1}, its
// factorization, the coupling K = BᵀRA + qDᵀC and the gain L = ΣK.
struct Evaluation {
  Matrix Sigma_inverse;
  Eigen::LLT<Matrix> Sigma_inverse_llt;
  Matrix K;
  Matrix L;
  Matrix closed_loop;
};

bool evaluate(const StateSpaceModel& F, double q, const Matrix& R, Evaluation& out) {
  const Index m = F.inputs();
  out.Sigma_inverse = symmetrized(Matrix::Identity(m, m) - F.B().transpose() * R * F.B() -
                                  q * F.D().transpose() * F.D());
  out.Sigma_inverse_llt.compute(out.Sigma_inverse);
  if (out.Sigma_inverse_llt.info() != Eigen::Success) return false;
  out.K = F.B().transpose() * R * F.A() + q * F.D().transpose() * F.C();
  out.L = out.Sigma_inverse_llt.solve(out.K);
  out.closed_loop = F.A() + F.B() * out.L;
  return true;
}

// f(R) - R for the fixed-point map f.
Matrix defect(const StateSpaceModel& F, double q, const Matrix& R, const Matrix& W,
              const Evaluation& e) {
  const Matrix& A = F.A();
  return symmetrized(A.transpose() * R * A - R + q * F.C().transpose() * F.C() + W +
                     e.K.transpose() * e.L);
}

double residual_scale(const StateSpaceModel& F, double q, const Matrix& R, const Matrix& W) {
  const double a = F.A().norm();
  const double c = F.C().norm();
  return 1.0 + R.norm() * (1.0 + a * a) + q * c * c + W.norm();
}

void validate(const StateSpaceModel& F, double q, const Matrix& W) {
  if (!std::isfinite(q) || q < 0.0) {
    throw std::invalid_argument("dare_stabilizing: q must be finite and nonnegative");
  }
  if (W.rows() != F.states() || W.cols() != F.states()) {
    throw DimensionError("dare_stabilizing: extra weight must be n x n");
  }
  require_finite(W, "dare_stabilizing extra weight");
}

}  // namespace

RiccatiSolution dare_stabilizing(const StateSpaceModel& F, double q,
                                 const RiccatiOptions& options) {
  return dare_stabilizing(F, q, Matrix::Zero(F.states(), F.states()), options);
}

RiccatiSolution dare_stabilizing(const StateSpaceModel& F, double q, const Matrix& extra_weight,
                                 const RiccatiOptions& options) {
  validate(F, q, extra_weight);
  const Index n = F.states();
  const Index m = F.inputs();
  const Matrix& A = F.A();
  const Matrix& B = F.B();

  const Matrix input_weight = symmetrized(Matrix::Identity(m, m) - q * F.D().transpose() * F.D());
  const Eigen::LLT<Matrix> input_weight_llt(input_weight);
  if (input_weight_llt.info() != Eigen::Success) {
    throw NoStabilizingSolution("dare_stabilizing: I - q DᵀD is not positive definite");
  }

  // Eliminating the cross term S = qCᵀD turns the equation into
  //   X = ÃᵀX(I + GX)^{-1}Ã + Q̃,  G = -B (I - qDᵀD)^{-1} Bᵀ,
  // whose fixed-point iterates from X = 0 the doubling recurrence below
  // reproduces at indices 2^k.
  const Matrix cross = q * F.C().transpose() * F.D();
  const Matrix input_solve_cross = input_weight_llt.solve(cross.transpose());
  Matrix Ak = A + B * input_solve_cross;
  Matrix Hk = symmetrized(q * F.C().transpose() * F.C() + extra_weight + cross * input_solve_cross);
  Matrix Gk = symmetrized(-B * input_weight_llt.solve(B.transpose()));

  const Matrix identity = Matrix::Identity(n, n);
  bool converged = (n == 0) || Hk.norm() == 0.0;
  int steps = 0;
  while (!converged && steps < options.max_iterations) {
    ++steps;
    const Eigen::PartialPivLU<Matrix> lu(identity + Gk * Hk);
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (!(pivots.minCoeff() > 1e-14 * pivots.maxCoeff())) {
      throw NoStabilizingSolution("dare_stabilizing: doubling iteration broke down at q = " +
                                  std::to_string(q));
    }
    Matrix rhs(n, 2 * n);
    rhs << Ak, Gk;
    const Matrix V = lu.solve(rhs);
    const auto V1 = V.leftCols(n);
    const auto V2 = V.rightCols(n);
    Matrix H_next = symmetrized(Hk + Ak.transpose() * Hk * V1);
    Gk = symmetrized(Gk + Ak * V2 * Ak.transpose());
    Ak = (Ak * V1).eval();
    if (!all_finite(H_next) || !all_finite(Gk) || !all_finite(Ak)) {
      throw NoStabilizingSolution("dare_stabilizing: iteration diverged at q = " + std::to_string(q));
    }
    // Every iterate of the monotone iteration stays below the stabilizing
    // solution, so Σ^{-1} must remain positive definite along the way.
    const Eigen::LLT<Matrix> domain(
        symmetrized(input_weight - B.transpose() * H_next * B));
    if (domain.info() != Eigen::Success) {
      throw NoStabilizingSolution("dare_stabilizing: I - BᵀRB - qDᵀD lost definiteness at q = " +
                                  std::to_string(q));
    }
    // The iterates increase monotonically below the stabilizing solution;
    // past the H∞ boundary the Möbius-type recurrence wraps around instead.
    Matrix step = H_next - Hk;
    const double slack = 1e-8 * (1.0 + H_next.norm());
    const Eigen::LLT<Matrix> increasing(symmetrized(step) + slack * identity);
    if (increasing.info() != Eigen::Success) {
      throw NoStabilizingSolution("dare_stabilizing: iterates stopped increasing at q = " +
                                  std::to_string(q));
    }
    const double change = step.norm();
    Hk = std::move(H_next);
    converged = change <= options.tol * Hk.norm();
  }

  RiccatiSolution solution;
  solution.q = q;
  solution.iterations = steps;
  solution.R = std::move(Hk);

  Evaluation e;
  if (!evaluate(F, q, solution.R, e)) {
    throw NoStabilizingSolution("dare_stabilizing: Σ is not positive definite at q = " +
                                std::to_string(q));
  }
  double radius = spectral_radius(e.closed_loop);
  const double radius_limit = 1.0 - options.boundary_margin;
  if (!converged) {
    if (radius >= radius_limit) {
      throw NoStabilizingSolution("dare_stabilizing: iteration stalled at the stability boundary");
    }
    throw MaxIterationsExceeded("dare_stabilizing: no convergence after " +
                                std::to_string(steps) + " doubling steps");
  }
  if (radius >= radius_limit) {
    throw NoStabilizingSolution("dare_stabilizing: closed loop not stable (radius " +
                                std::to_string(radius) + ") at q = " + std::to_string(q));
  }

  const double scale = residual_scale(F, q, solution.R, extra_weight);
  Matrix current_defect = defect(F, q, solution.R, extra_weight, e);
  double residual = current_defect.norm();
  for (int i = 0; i < options.refinement_steps; ++i) {
    if (residual <= 1e-15 * scale) break;
    Matrix candidate;
    try {
      candidate = symmetrized(solution.R + solve_stein(e.closed_loop.transpose(), current_defect));
    } catch (const StabilityError&) {
      break;
    }
    Evaluation ce;
    if (!evaluate(F, q, candidate, ce)) break;
    const Matrix candidate_defect = defect(F, q, candidate, extra_weight, ce);
    const double candidate_residual = candidate_defect.norm();
    if (!(candidate_residual < residual)) break;
    const double candidate_radius = spectral_radius(ce.closed_loop);
    if (candidate_radius >= radius_limit) break;
    solution.R = std::move(candidate);
    e = std::move(ce);
    current_defect = candidate_defect;
    residual = candidate_residual;
    radius = candidate_radius;
  }
  if (!(residual <= 1e-8 * scale)) {
    throw NoStabilizingSolution("dare_stabilizing: residual " + std::to_string(residual) +
                                " too large at q = " + std::to_string(q));
  }

  solution.Sigma_inverse = e.Sigma_inverse;
  solution.Sigma = symmetrized(e.Sigma_inverse_llt.solve(Matrix::Identity(m, m)));
  solution.L = std::move(e.L);
  solution.closed_loop = std::move(e.closed_loop);
  solution.closed_loop_radius = radius;
  solution.residual = residual;
  return solution;
}

double riccati_residual(const StateSpaceModel& F, double q, const Matrix& R) {
  return riccati_residual(F, q, R, Matrix::Zero(F.states(), F.states()));
}

double riccati_residual(const StateSpaceModel& F, double q, const Matrix& R,
                        const Matrix& extra_weight) {
  if (R.rows() != F.states() || R.cols() != F.states()) {
    throw DimensionError("riccati_residual: R must be n x n");
  }
  validate(F, q, extra_weight);
  Evaluation e;
  if (!evaluate(F, q, R, e)) {
    throw NotPositiveDefinite("riccati_residual: I - BᵀRB - qDᵀD is not positive definite");
  }
  return defect(F, q, R, extra_weight, e).norm();
}

}  // namespace aninorm
