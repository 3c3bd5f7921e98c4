#include "aninorm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "aninorm/errors.hpp"
#include "aninorm/norms.hpp"
#include "aninorm/parallel.hpp"
#include "aninorm/riccati.hpp"

namespace aninorm {

namespace {

nlohmann::json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

bool riccati_feasible(const StateSpaceModel& F, double q) {
  try {
    dare_stabilizing(F, q);
    return true;
  } catch (const NoStabilizingSolution&) {
  } catch (const MaxIterationsExceeded&) {
  }
  return false;
}

// Largest q with a stabilizing Riccati solution, by bisection in q. The
// starting ceiling comes from a coarse frequency sweep: any sampled gain
// gives 1/gain² >= ‖F‖∞^{-2}.
double feasible_q_limit(const StateSpaceModel& F) {
  double peak = 0.0;
  constexpr int sweep = 64;
  for (int k = 0; k <= sweep; ++k) {
    const double omega = std::numbers::pi * k / sweep;
    try {
      peak = std::max(peak, max_singular_value(freq_response(F, omega)));
    } catch (const SingularResolvent&) {
      return 0.0;
    }
  }
  if (peak == 0.0) return std::numeric_limits<double>::infinity();
  double q_lo = 0.0;
  double q_hi = 1.0 / (peak * peak);
  for (int i = 0; riccati_feasible(F, q_hi); ++i) {
    if (i == 60) throw BracketFailure("grid_oracle: no infeasible q found");
    q_lo = q_hi;
    q_hi *= 2.0;
  }
  while (q_hi - q_lo > 1e-13 * q_hi) {
    const double mid = 0.5 * (q_lo + q_hi);
    if (mid <= q_lo || mid >= q_hi) break;
    (riccati_feasible(F, mid) ? q_lo : q_hi) = mid;
  }
  return q_lo;
}

// γ²(q) = (1/q)(1 - e^{-2a/m} det(Σ^{-1})^{1/m}).
double gamma_squared_of_q(const StateSpaceModel& F, double a, double q) {
  const RiccatiSolution s = dare_stabilizing(F, q);
  const double md = static_cast<double>(F.inputs());
  return -std::expm1((logdet_pd(s.Sigma_inverse) - 2.0 * a) / md) / q;
}

std::vector<double> two_sided_log_grid(double q_max, int points) {
  constexpr double eps = 1e-6;
  const int lower = points / 2;
  const int upper = points - lower;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  auto log_space = [](double from, double to, int count, int k) {
    if (count == 1) return from;
    return std::exp(std::log(from) + (std::log(to) - std::log(from)) * k / (count - 1));
  };
  for (int k = 0; k < lower; ++k) grid.push_back(q_max * log_space(eps, 0.5, lower, k));
  // Distance to the ceiling runs from just under one half down to eps.
  for (int k = 0; k < upper; ++k) {
    const double gap = log_space(0.5, eps, upper + 1, k + 1);
    grid.push_back(q_max * (1.0 - gap));
  }
  return grid;
}

double h2_ratio_sample(const StateSpaceModel& F, double a, std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  const Index m = F.inputs();
  const Index order = std::uniform_int_distribution<Index>(1, 3)(rng);
  const double rho = std::uniform_real_distribution<double>(0.3, 0.98)(rng);
  const std::uint64_t filter_seed = rng();
  try {
    const ShapingFilter raw(random_stable(order, m, m, filter_seed, rho));
    const ShapingFilter G = shaping_blend(raw, a, 1e-3);
    const double g = h2_norm(G.model());
    if (!(g > 0.0)) return 0.0;
    return h2_norm(cascade(F, G.model())) / g;
  } catch (const Error&) {
    return 0.0;
  }
}

}  // namespace

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void Report::add(std::string assertion, double observed, double bound, bool pass) {
  checks.push_back(Check{std::move(assertion), observed, bound, pass});
}

nlohmann::json Report::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const Check& c : checks) {
    entries.push_back({{"assertion", c.assertion},
                       {"observed", finite_or_null(c.observed)},
                       {"bound", finite_or_null(c.bound)},
                       {"pass", c.pass}});
  }
  return {{"passed", passed()}, {"checks", entries}};
}

GridOracleResult grid_oracle(const StateSpaceModel& F, double a, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid_oracle: grid_size must be at least 2");
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("grid_oracle: a must be finite and nonnegative");
  }
  if (F.inputs() == 0) throw DimensionError("grid_oracle: model has no inputs");
  if (!is_stable(F)) throw StabilityError("grid_oracle: model is not stable");

  GridOracleResult result;
  const double q_max = feasible_q_limit(F);
  if (std::isinf(q_max)) return result;
  if (!(q_max > 0.0)) throw StabilityError("grid_oracle: resolvent is singular on the unit circle");

  double best = std::numeric_limits<double>::infinity();
  for (double q : two_sided_log_grid(q_max, grid_size)) {
    ++result.evaluations;
    double value;
    try {
      value = gamma_squared_of_q(F, a, q);
    } catch (const Error&) {
      continue;
    }
    if (value < best) {
      best = value;
      result.q_star = q;
    }
  }
  if (!std::isfinite(best)) throw NoStabilizingSolution("grid_oracle: no grid point was feasible");
  result.gamma = std::sqrt(std::max(0.0, best));
  return result;
}

double grid_oracle_norm(const StateSpaceModel& F, double a, int grid_size) {
  return grid_oracle(F, a, grid_size).gamma;
}

double monte_carlo_lower_bound(const StateSpaceModel& F, double a, int samples,
                               std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("monte_carlo_lower_bound: samples must be positive");
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("monte_carlo_lower_bound: a must be finite and nonnegative");
  }
  if (!is_stable(F)) throw StabilityError("monte_carlo_lower_bound: model is not stable");
  std::vector<double> ratios(static_cast<std::size_t>(samples), 0.0);
  parallel_for(ratios.size(), [&](std::size_t i) { ratios[i] = h2_ratio_sample(F, a, seed, i); });
  return *std::max_element(ratios.begin(), ratios.end());
}

Report limits_check(const StateSpaceModel& F, const std::vector<double>& a_list, double tol) {
  if (a_list.empty()) throw std::invalid_argument("limits_check: a_list is empty");
  if (!std::is_sorted(a_list.begin(), a_list.end())) {
    throw std::invalid_argument("limits_check: a_list must be ascending");
  }
  const double md = static_cast<double>(F.inputs());
  const double h2_scaled = h2_norm(F) / std::sqrt(md);
  const double hinf = hinf_norm(F, tol);
  const double slack = 10.0 * tol;

  Report report;
  std::vector<AnisoNormResult> norms;
  for (double a : a_list) norms.push_back(anisotropic_norm(AnisoQuery{F, a, tol}));

  for (std::size_t i = 0; i < a_list.size(); ++i) {
    const std::string at = "[a=" + std::to_string(a_list[i]) + "]";
    const AnisoNormResult& r = norms[i];
    const double gamma = r.gamma;

    const double lower = h2_scaled * (1.0 - slack) - slack;
    report.add("lower_bound_h2" + at, gamma, lower, gamma >= lower);
    const double upper = hinf * (1.0 + slack) + slack;
    report.add("upper_bound_hinf" + at, gamma, upper, gamma <= upper);

    if (i + 1 < a_list.size()) {
      const double next = norms[i + 1].gamma;
      const double allowance = 1e-8 * std::max(1.0, gamma);
      report.add("monotone" + at, gamma - next, allowance, gamma - next <= allowance);
    }

    const Matrix& Phi = r.phi_star;
    const Matrix& B = F.B();
    const Matrix& D = F.D();
    const double trace = (B.transpose() * Phi * B + D.transpose() * D).trace();
    double trace_bound;
    if (std::isinf(r.eta_star)) {
      trace_bound = md * r.gamma_hat;
    } else {
      const double c = std::exp(-2.0 * a_list[i] / md);
      trace_bound = md * (r.gamma_hat - r.eta_star * (1.0 - c)) / c;
    }
    const double trace_allowance = trace_bound + 1e-8 * (1.0 + std::abs(trace_bound));
    report.add("trace_bound" + at, trace, trace_allowance, trace <= trace_allowance);

    if (F.states() > 0) {
      const Matrix& A = F.A();
      const Matrix& C = F.C();
      const double lyapunov =
          max_eigenvalue_symmetric(symmetrized(A.transpose() * Phi * A - Phi + C.transpose() * C));
      const double lyapunov_bound = 1e-8 * (1.0 + Phi.norm());
      report.add("lyapunov" + at, lyapunov, lyapunov_bound, lyapunov <= lyapunov_bound);
    }
  }
  return report;
}

double convexity_violation(const StateSpaceModel& F, double a, double eta1, double eta2) {
  const double f1 = gamma_hat_of_eta(F, a, eta1);
  const double f2 = gamma_hat_of_eta(F, a, eta2);
  const double fm = gamma_hat_of_eta(F, a, 0.5 * (eta1 + eta2));
  return std::max(0.0, fm - 0.5 * (f1 + f2)) / (1.0 + std::abs(fm));
}

ConvexityProbeResult convexity_probe(const StateSpaceModel& F, double a, int n_triples,
                                     std::uint64_t seed, double bound) {
  if (n_triples < 1) throw std::invalid_argument("convexity_probe: n_triples must be positive");
  const HinfBracket bracket = hinf_bracket(F);
  ConvexityProbeResult out;
  if (bracket.upper == 0.0) {
    out.report.add("midpoint_convexity", 0.0, bound, true);
    return out;
  }
  const double md = static_cast<double>(F.inputs());
  const double eta_lo = bracket.upper * bracket.upper * (1.0 + 1e-6);
  double eta_hi = 100.0 * eta_lo;
  if (a > 0.0) {
    const double one_minus_c = -std::expm1(-2.0 * a / md);
    eta_hi = std::max(10.0 * eta_lo, gamma_hat_of_eta(F, a, eta_lo) / one_minus_c);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> t(std::log(eta_lo), std::log(eta_hi));
  for (int i = 0; i < n_triples; ++i) {
    const double eta1 = std::exp(t(rng));
    const double eta2 = std::exp(t(rng));
    out.worst_violation = std::max(out.worst_violation, convexity_violation(F, a, eta1, eta2));
    ++out.triples;
  }
  out.report.add("midpoint_convexity", out.worst_violation, bound, out.worst_violation <= bound);
  return out;
}

}  // namespace aninorm
