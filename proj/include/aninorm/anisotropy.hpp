#pragma once

#include <limits>
#include <optional>
#include <string>

#include "aninorm/lti.hpp"
#include "aninorm/norms.hpp"
#include "aninorm/riccati.hpp"

namespace aninorm {

// ---------------------------------------------------------------------------
// Mean anisotropy of a shaping filter
// ---------------------------------------------------------------------------

struct QuadratureOptions {
  int initial_grid = 256;
  int max_grid = 1 << 18;
  double tol = 1e-9;
  // ln det S(ω) below this value at any node means S is rank deficient.
  double log_det_floor = -644.0;  // ≈ ln(1e-280)
};

/// Mean anisotropy (nats per step) of the sequence produced by driving G with
/// unit Gaussian white noise:
///   Ā(G) = -(1/4π) ∫ ln det(m S(ω) / ‖G‖₂²) dω,  S = Ĝ Ĝ*.
/// Uniform periodic trapezoid starting at grid_size nodes, doubled until two
/// successive estimates agree to options.tol. Returns +infinity when S is
/// numerically singular at a node. Throws QuadratureFailure when the grid
/// limit is reached first.
double mean_anisotropy(const ShapingFilter& G, int grid_size = 256,
                       const QuadratureOptions& options = {});

/// θ·G_raw + (1 - θ)·I with θ chosen by bisection so that Ā lands in
/// [a_target - tol, a_target]; returns G_raw itself when Ā(G_raw) <= a_target.
ShapingFilter shaping_blend(const ShapingFilter& raw, double a_target, double tol);

/// Parallel blend θ·G + (1 - θ)·I as a realization with G's state dimension.
StateSpaceModel blend_with_identity(const StateSpaceModel& G, double theta);

// ---------------------------------------------------------------------------
// a-anisotropic norm
// ---------------------------------------------------------------------------

/// One evaluation of the η-marginal of the convex program: with q = 1/η and
/// the stabilizing Riccati solution R̂(q), Φ = η R̂ and
///   γ̂(η) = η - (det(e^{-2a/m}(ηI - BᵀΦB - DᵀD)))^{1/m}.
struct EtaProbe {
  double eta = 0.0;
  double gamma_hat = 0.0;
  RiccatiSolution riccati;
};

EtaProbe probe_eta(const StateSpaceModel& F, double a, double eta,
                   const RiccatiOptions& options = {});

/// γ̂(η) alone. Throws NoStabilizingSolution when η <= ‖F‖∞².
double gamma_hat_of_eta(const StateSpaceModel& F, double a, double eta,
                        const RiccatiOptions& options = {});

struct AnisoQuery {
  StateSpaceModel model;
  double a = 0.0;
  double tol = 1e-9;
  // Upper end of the η search; 0 selects the localization bound
  // γ̂/(1 - e^{-2a/m}) evaluated at the best value found so far.
  double eta_cap = 0.0;
  int max_evaluations = 400;
  RiccatiOptions riccati{};
};

enum class AnisoStatus { Converged, BoundaryA0, BoundaryHinf };

std::string to_string(AnisoStatus status);

struct AnisoNormResult {
  double gamma = 0.0;
  double gamma_hat = 0.0;
  double eta_star = std::numeric_limits<double>::infinity();
  double q_star = 0.0;
  Matrix phi_star;
  int evaluations = 0;
  AnisoStatus status = AnisoStatus::Converged;
  // ‖F‖₂/√m and the feasible end of the H∞ bracket: the result always lies
  // between them up to tolerance.
  double h2_bound = 0.0;
  double hinf_bound = 0.0;
};

/// |||F|||_a = sqrt(inf over η of γ̂(η)), minimized by golden-section search
/// in ln η between the H∞ boundary η = ‖F‖∞² and the localization ceiling
/// η <= γ̂/(1 - e^{-2a/m}). a = 0 returns ‖F‖₂/√m directly.
/// Throws StabilityError, ToleranceNotReached.
AnisoNormResult anisotropic_norm(const AnisoQuery& query);

/// Witness of |||F|||_a < γ: q ∈ (0, min(γ^{-2}, ‖F‖∞^{-2})) and R ≻ 0 with
///   ln det(I - BᵀRB - qDᵀD) > m ln(1 - qγ²) + 2a
/// and the strict linear matrix inequality
///   [AᵀRA - R, AᵀRB; BᵀRA, BᵀRB - I] + q [Cᵀ; Dᵀ][C, D] ≺ 0.
struct FeasibilityWitness {
  double q = 0.0;
  Matrix R;
  double determinant_margin = 0.0;  // lhs - rhs of the log-determinant form
  double lmi_max_eigenvalue = 0.0;
};

struct FeasibilityResult {
  bool feasible = false;
  double norm = 0.0;
  std::optional<FeasibilityWitness> witness;
};

/// Feasible iff anisotropic_norm < γ - tol; the witness then satisfies both
/// inequalities strictly.
FeasibilityResult aninorm_feasible(const StateSpaceModel& F, double a, double gamma,
                                   double tol = 1e-9);

/// Maximum eigenvalue of the block LMI above at (q, R).
double sanbrl_lmi_max_eigenvalue(const StateSpaceModel& F, double q, const Matrix& R);

}  // namespace aninorm
