#include "aninorm/anisotropy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <unordered_map>

#include "aninorm/errors.hpp"

namespace aninorm {

namespace {

bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

// ln det S(ω) = 2 ln |det Ĝ(ω)| for square Ĝ.
double log_det_spectral_density(const ComplexMatrix& response) {
  const Eigen::PartialPivLU<ComplexMatrix> lu(response);
  double sum = 0.0;
  for (Index i = 0; i < response.rows(); ++i) {
    const double pivot = std::abs(lu.matrixLU()(i, i));
    if (pivot == 0.0) return -std::numeric_limits<double>::infinity();
    sum += std::log(pivot);
  }
  return 2.0 * sum;
}

// Node ω = 2π·index / options.max_grid. Indices on coarse grids are multiples
// of the finest-grid stride so that node values are shared across doublings.
using LogDetSampler = std::function<double(long index, double omega)>;

double mean_anisotropy_quadrature(const LogDetSampler& log_det_at, Index m, double h2_squared,
                                  int grid_size, const QuadratureOptions& options) {
  if (!is_power_of_two(grid_size) || grid_size < 64) {
    throw std::invalid_argument("mean_anisotropy: grid_size must be a power of two >= 64");
  }
  if (!is_power_of_two(options.max_grid) || options.max_grid < grid_size) {
    throw std::invalid_argument("mean_anisotropy: max_grid must be a power of two >= grid_size");
  }
  if (!(h2_squared > 0.0)) return std::numeric_limits<double>::infinity();

  const double two_pi = 2.0 * std::numbers::pi;
  const long finest = options.max_grid;
  bool rank_deficient = false;
  auto sample = [&](long index) {
    const double value = log_det_at(index, two_pi * static_cast<double>(index) / finest);
    if (!(value >= options.log_det_floor)) rank_deficient = true;
    return value;
  };

  // Conjugate symmetry: integrate over [0, π]; ω = 0 and ω = π carry weight 1,
  // interior nodes weight 2, out of N nodes on the full circle.
  long N = grid_size;
  long stride = finest / N;
  double weighted_sum = sample(0) + sample(finest / 2);
  for (long k = 1; k < N / 2; ++k) weighted_sum += 2.0 * sample(k * stride);
  if (rank_deficient) return std::numeric_limits<double>::infinity();

  const double md = static_cast<double>(m);
  auto anisotropy = [&](double sum, long nodes) {
    const double mean_log_det = sum / static_cast<double>(nodes);
    return -0.5 * (md * std::log(md / h2_squared) + mean_log_det);
  };
  double estimate = anisotropy(weighted_sum, N);
  while (N < finest) {
    // New nodes of the doubled grid are the odd multiples of the half stride.
    const long half = stride / 2;
    for (long j = 0; j < N / 2; ++j) weighted_sum += 2.0 * sample((2 * j + 1) * half);
    if (rank_deficient) return std::numeric_limits<double>::infinity();
    N *= 2;
    stride = half;
    const double refined = anisotropy(weighted_sum, N);
    if (std::abs(refined - estimate) < options.tol) return std::max(0.0, refined);
    estimate = refined;
  }
  throw QuadratureFailure("mean_anisotropy: quadrature did not converge on " +
                          std::to_string(finest) + " nodes");
}

// Frequency responses of a raw filter cached by node index, reused for every
// blend parameter tried by the bisection.
class BlendSampler {
 public:
  explicit BlendSampler(const StateSpaceModel& raw) : raw_(raw) {}

  double log_det(long index, double omega, double theta) {
    auto it = cache_.find(index);
    if (it == cache_.end()) it = cache_.emplace(index, freq_response(raw_, omega)).first;
    ComplexMatrix response = theta * it->second;
    response.diagonal().array() += (1.0 - theta);
    return log_det_spectral_density(response);
  }

 private:
  const StateSpaceModel& raw_;
  std::unordered_map<long, ComplexMatrix> cache_;
};

double blended_anisotropy(BlendSampler& sampler, const StateSpaceModel& raw, double theta) {
  const StateSpaceModel blended = blend_with_identity(raw, theta);
  const double h2 = h2_norm(blended);
  QuadratureOptions options;
  return mean_anisotropy_quadrature(
      [&](long index, double omega) { return sampler.log_det(index, omega, theta); },
      raw.inputs(), h2 * h2, options.initial_grid, options);
}

}  // namespace

double mean_anisotropy(const ShapingFilter& G, int grid_size, const QuadratureOptions& options) {
  const StateSpaceModel& model = G.model();
  const double h2 = h2_norm(model);
  return mean_anisotropy_quadrature(
      [&](long, double omega) { return log_det_spectral_density(freq_response(model, omega)); },
      model.inputs(), h2 * h2, grid_size, options);
}

StateSpaceModel blend_with_identity(const StateSpaceModel& G, double theta) {
  if (G.inputs() != G.outputs()) throw NotSquare("blend_with_identity: filter must be square");
  Matrix D = theta * G.D();
  D.diagonal().array() += (1.0 - theta);
  return StateSpaceModel(G.A(), G.B(), theta * G.C(), std::move(D));
}

ShapingFilter shaping_blend(const ShapingFilter& raw, double a_target, double tol) {
  if (!(a_target >= 0.0) || !std::isfinite(a_target)) {
    throw std::invalid_argument("shaping_blend: a_target must be finite and nonnegative");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("shaping_blend: tol must be positive");
  const StateSpaceModel& model = raw.model();
  BlendSampler sampler(model);
  if (blended_anisotropy(sampler, model, 1.0) <= a_target) return raw;

  // Ā(θ = 0) = 0 <= a_target < Ā(θ = 1).
  double lo = 0.0;
  double hi = 1.0;
  double a_lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    if (a_lo >= a_target - tol) return ShapingFilter(blend_with_identity(model, lo));
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double a_mid = blended_anisotropy(sampler, model, mid);
    if (a_mid <= a_target) {
      lo = mid;
      a_lo = a_mid;
    } else {
      hi = mid;
    }
  }
  throw QuadratureFailure("shaping_blend: could not reach the target mean anisotropy");
}

std::string to_string(AnisoStatus status) {
  switch (status) {
    case AnisoStatus::Converged:
      return "Converged";
    case AnisoStatus::BoundaryA0:
      return "BoundaryA0";
    case AnisoStatus::BoundaryHinf:
      return "BoundaryHinf";
  }
  return "Unknown";
}

EtaProbe probe_eta(const StateSpaceModel& F, double a, double eta, const RiccatiOptions& options) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("gamma_hat_of_eta: eta must be positive and finite");
  }
  if (!(a >= 0.0)) throw std::invalid_argument("gamma_hat_of_eta: a must be nonnegative");
  const Index m = F.inputs();
  if (m == 0) throw DimensionError("gamma_hat_of_eta: model has no inputs");
  EtaProbe probe;
  probe.eta = eta;
  const double q = 1.0 / eta;
  probe.riccati = dare_stabilizing(F, q, options);
  // ηI - BᵀΦB - DᵀD = η (I - M),  M = BᵀR̂B + qDᵀD.
  const Matrix M = F.B().transpose() * probe.riccati.R * F.B() + q * F.D().transpose() * F.D();
  const double log_det = logdet_identity_minus(M);
  probe.gamma_hat = -eta * std::expm1((log_det - 2.0 * a) / static_cast<double>(m));
  return probe;
}

double gamma_hat_of_eta(const StateSpaceModel& F, double a, double eta,
                        const RiccatiOptions& options) {
  return probe_eta(F, a, eta, options).gamma_hat;
}

AnisoNormResult anisotropic_norm(const AnisoQuery& query) {
  const StateSpaceModel& F = query.model;
  const double a = query.a;
  const double tol = query.tol;
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("anisotropic_norm: a must be finite and nonnegative");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("anisotropic_norm: tol must be positive");
  const Index m = F.inputs();
  if (m == 0) throw DimensionError("anisotropic_norm: model has no inputs");
  if (!is_stable(F)) throw StabilityError("anisotropic_norm: model is not stable");

  const double md = static_cast<double>(m);
  AnisoNormResult result;
  const double h2 = h2_norm(F);
  result.h2_bound = h2 / std::sqrt(md);
  const HinfBracket bracket = hinf_bracket(F, tol, query.riccati);
  result.hinf_bound = bracket.upper;

  if (a == 0.0) {
    // The infimum over η is approached as η → ∞ where Φ tends to the
    // observability Gramian.
    result.status = AnisoStatus::BoundaryA0;
    result.gamma = result.h2_bound;
    result.gamma_hat = h2 * h2 / md;
    result.phi_star = observability_gramian(F);
    return result;
  }
  if (bracket.upper == 0.0) {
    result.phi_star = Matrix::Zero(F.states(), F.states());
    return result;
  }

  std::optional<EtaProbe> best;
  auto evaluate = [&](double eta) -> double {
    if (result.evaluations >= query.max_evaluations) {
      throw ToleranceNotReached("anisotropic_norm: evaluation budget exhausted");
    }
    ++result.evaluations;
    try {
      EtaProbe probe = probe_eta(F, a, eta, query.riccati);
      const double value = probe.gamma_hat;
      if (!best || value < best->gamma_hat) best = std::move(probe);
      return value;
    } catch (const NoStabilizingSolution&) {
    } catch (const MaxIterationsExceeded&) {
    } catch (const NotPositiveDefinite&) {
    }
    return std::numeric_limits<double>::infinity();
  };

  // Feasible end of the H∞ bracket; nudged outward if the boundary verdict
  // of the Riccati solver is stricter than the bracket's.
  double eta_lo = bracket.upper * bracket.upper;
  for (int i = 0; !std::isfinite(evaluate(eta_lo)); ++i) {
    if (i == 30) throw NoStabilizingSolution("anisotropic_norm: no feasible eta above the H-infinity bound");
    eta_lo *= 1.0 + 10.0 * tol * std::ldexp(1.0, i);
  }

  // f(η) >= η(1 - e^{-2a/m}) since det Σ^{-1} <= 1, so the minimizer lies
  // below best/(1 - e^{-2a/m}).
  const double one_minus_c = -std::expm1(-2.0 * a / md);
  const double hard_cap = query.eta_cap > 0.0 ? query.eta_cap : 1e12 * std::max(1.0, eta_lo);
  auto localization = [&] {
    return std::max(eta_lo, std::min(hard_cap, best->gamma_hat / one_minus_c));
  };
  double eta_hi = localization();
  for (int round = 0; round < 4 && eta_hi > eta_lo * (1.0 + tol); ++round) {
    evaluate(std::sqrt(eta_lo) * std::sqrt(eta_hi));
    const double tightened = localization();
    const bool shrunk = tightened < 0.9 * eta_hi;
    eta_hi = tightened;
    if (!shrunk) break;
  }

  // Golden-section search in t = ln η.
  if (eta_hi > eta_lo * (1.0 + tol)) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double t_lo = std::log(eta_lo);
    double t_hi = std::log(eta_hi);
    double x1 = t_hi - r * (t_hi - t_lo);
    double x2 = t_lo + r * (t_hi - t_lo);
    double f1 = evaluate(std::exp(x1));
    double f2 = evaluate(std::exp(x2));
    for (;;) {
      const double width = t_hi - t_lo;
      const double spread = std::abs(f1 - f2);
      const double scale = 1.0 + std::min(std::abs(f1), std::abs(f2));
      if (width <= tol && spread <= tol * scale) break;
      if (width <= 1e-15) break;
      if (f1 <= f2) {
        t_hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = t_hi - r * (t_hi - t_lo);
        f1 = evaluate(std::exp(x1));
      } else {
        t_lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = t_lo + r * (t_hi - t_lo);
        f2 = evaluate(std::exp(x2));
      }
    }
    evaluate(std::exp(0.5 * (t_lo + t_hi)));
  }

  const EtaProbe& star = *best;
  result.gamma_hat = star.gamma_hat;
  result.gamma = std::sqrt(std::max(0.0, star.gamma_hat));
  result.eta_star = star.eta;
  result.q_star = 1.0 / star.eta;
  result.phi_star = star.eta * star.riccati.R;
  result.status = std::log(star.eta / eta_lo) <= 10.0 * tol ? AnisoStatus::BoundaryHinf
                                                             : AnisoStatus::Converged;
  return result;
}

double sanbrl_lmi_max_eigenvalue(const StateSpaceModel& F, double q, const Matrix& R) {
  const Index n = F.states();
  const Index m = F.inputs();
  const Matrix& A = F.A();
  const Matrix& B = F.B();
  const Matrix& C = F.C();
  const Matrix& D = F.D();
  Matrix lmi(n + m, n + m);
  lmi.topLeftCorner(n, n) = A.transpose() * R * A - R + q * C.transpose() * C;
  lmi.topRightCorner(n, m) = A.transpose() * R * B + q * C.transpose() * D;
  lmi.bottomLeftCorner(m, n) = lmi.topRightCorner(n, m).transpose();
  lmi.bottomRightCorner(m, m) =
      B.transpose() * R * B - Matrix::Identity(m, m) + q * D.transpose() * D;
  return max_eigenvalue_symmetric(lmi);
}

FeasibilityResult aninorm_feasible(const StateSpaceModel& F, double a, double gamma, double tol) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("aninorm_feasible: gamma must be positive and finite");
  }
  AnisoQuery query{F, a, tol};
  const AnisoNormResult norm = anisotropic_norm(query);
  FeasibilityResult out;
  out.norm = norm.gamma;
  if (!(norm.gamma < gamma - tol)) return out;

  const Index m = F.inputs();
  const double md = static_cast<double>(m);
  const double gamma2 = gamma * gamma;
  const double c = std::exp(-2.0 * a / md);

  // A q with γ²(q) < γ²: the optimizer, or for a = 0 (infimum at q → 0) a
  // small enough q along the decreasing tail.
  double eta = norm.eta_star;
  if (!std::isfinite(eta)) {
    eta = 2.0 * std::max(gamma2, norm.hinf_bound * norm.hinf_bound);
    for (int i = 0; i < 200 && !(gamma_hat_of_eta(F, a, eta) < gamma2); ++i) eta *= 2.0;
  }
  double q = 1.0 / eta;
  if (q * gamma2 >= 1.0 - 1e-12) {
    // γ²(q) < γ² at q = (1 - κ)/γ² whenever κ < c·det(Σ^{-1}(q))^{1/m}.
    double kappa = 0.5;
    for (int i = 0; i < 200; ++i, kappa *= 0.5) {
      const double candidate = (1.0 - kappa) / gamma2;
      try {
        const RiccatiSolution s = dare_stabilizing(F, candidate);
        const double d = std::exp(logdet_pd(s.Sigma_inverse) / md);
        if (kappa < 0.999 * c * d) {
          q = candidate;
          break;
        }
      } catch (const Error&) {
      }
    }
  }

  // Solve the equation with an added state weight δI: the Riccati inequality
  // becomes strict while the determinant condition survives for small δ.
  const Index n = F.states();
  const RiccatiSolution base = dare_stabilizing(F, q);
  const double rhs = md * std::log1p(-q * gamma2) + 2.0 * a;
  double delta = 1e-3 * (1.0 + base.R.norm());
  for (int i = 0; i < 80; ++i, delta *= 0.5) {
    RiccatiSolution s;
    try {
      s = dare_stabilizing(F, q, delta * Matrix::Identity(n, n));
    } catch (const Error&) {
      continue;
    }
    const Matrix M = F.B().transpose() * s.R * F.B() + q * F.D().transpose() * F.D();
    double margin;
    try {
      margin = logdet_identity_minus(M) - rhs;
    } catch (const NotPositiveDefinite&) {
      continue;
    }
    const double lmi = sanbrl_lmi_max_eigenvalue(F, q, s.R);
    const bool positive = n == 0 || min_eigenvalue_symmetric(s.R) > 0.0;
    if (margin > 0.0 && lmi < 0.0 && positive) {
      out.feasible = true;
      out.witness = FeasibilityWitness{q, s.R, margin, lmi};
      return out;
    }
  }
  throw ToleranceNotReached("aninorm_feasible: could not construct a strict witness");
}

}  // namespace aninorm
