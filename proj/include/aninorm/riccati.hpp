#pragma once

#include "aninorm/lti.hpp"
#include "aninorm/numkit.hpp"

namespace aninorm {

struct RiccatiOptions {
  // Relative change of the iterate below which the doubling loop stops.
  double tol = 1e-12;
  // Cap on doubling steps. Step k reproduces fixed-point iterate 2^k, so the
  // cap is reached only when the iteration stalls at the stability boundary.
  int max_iterations = 100;
  // Closed loops with spectral radius >= 1 - boundary_margin are rejected.
  double boundary_margin = 1e-9;
  // Newton refinement steps applied after convergence (each one squares the
  // error); skipped once the residual is at rounding level.
  int refinement_steps = 2;
};

/// Stabilizing solution of
///   R = AᵀRA + qCᵀC + W + (AᵀRB + qCᵀD) Σ (BᵀRA + qDᵀC),
///   Σ = (I - BᵀRB - qDᵀD)^{-1} ≻ 0,
/// together with the gain L = Σ(BᵀRA + qDᵀC) and closed loop A + BL.
/// W is an optional extra state weight (zero for the plain equation).
struct RiccatiSolution {
  double q = 0.0;
  Matrix R;
  Matrix L;
  Matrix Sigma;
  Matrix Sigma_inverse;
  Matrix closed_loop;
  double closed_loop_radius = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Throws NoStabilizingSolution when no stabilizing solution with Σ ≻ 0
/// exists at working precision (q >= ‖F‖∞^{-2}), MaxIterationsExceeded when
/// the doubling stalls away from the boundary.
RiccatiSolution dare_stabilizing(const StateSpaceModel& F, double q,
                                 const RiccatiOptions& options = {});

RiccatiSolution dare_stabilizing(const StateSpaceModel& F, double q, const Matrix& extra_weight,
                                 const RiccatiOptions& options = {});

/// Frobenius norm of AᵀRA - R + qCᵀC + (AᵀRB + qCᵀD)(I - BᵀRB - qDᵀD)^{-1}(BᵀRA + qDᵀC).
/// Throws NotPositiveDefinite when I - BᵀRB - qDᵀD is not positive definite.
double riccati_residual(const StateSpaceModel& F, double q, const Matrix& R);
double riccati_residual(const StateSpaceModel& F, double q, const Matrix& R,
                        const Matrix& extra_weight);

}  // namespace aninorm
