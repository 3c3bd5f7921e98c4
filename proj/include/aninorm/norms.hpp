#pragma once

#include <vector>

#include "aninorm/lti.hpp"
#include "aninorm/riccati.hpp"

namespace aninorm {

/// ‖F‖₂ = sqrt(tr(C P Cᵀ + D Dᵀ)), P = A P Aᵀ + B Bᵀ. Throws StabilityError.
double h2_norm(const StateSpaceModel& F);

/// Observability Gramian Wo = Aᵀ Wo A + CᵀC.
Matrix observability_gramian(const StateSpaceModel& F);

/// Largest σ̄(F̂(ω)) over 512 uniform frequencies on [0, π], refined four
/// times more finely around the dominant peaks. A lower bound on ‖F‖∞.
double peak_gain_on_grid(const StateSpaceModel& F);

struct HinfBracket {
  double lower = 0.0;  // ‖F‖∞ >= lower
  double upper = 0.0;  // dare_stabilizing succeeds at q = upper^{-2}
  int riccati_solves = 0;
};

/// Bisection on γ with the bounded-real test "dare_stabilizing(F, γ^{-2})
/// succeeds" until upper - lower <= tol * upper.
HinfBracket hinf_bracket(const StateSpaceModel& F, double tol = 1e-9,
                         const RiccatiOptions& options = {});

/// Midpoint of hinf_bracket. Throws StabilityError, BracketFailure.
double hinf_norm(const StateSpaceModel& F, double tol = 1e-9);

}  // namespace aninorm
