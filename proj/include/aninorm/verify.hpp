#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "aninorm/anisotropy.hpp"
#include "aninorm/lti.hpp"

namespace aninorm {

// Independent cross-checks of anisotropic_norm. The grid oracle shares only
// the Riccati kernel with the main path; the Monte-Carlo bound shares only
// the H2, cascade and quadrature code.

struct Check {
  std::string assertion;
  double observed = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct Report {
  std::vector<Check> checks;

  bool passed() const;
  void add(std::string assertion, double observed, double bound, bool pass);
  nlohmann::json to_json() const;
};

struct GridOracleResult {
  double gamma = 0.0;
  double q_star = 0.0;
  int evaluations = 0;
};

/// Minimizes γ²(q) = (1/q)(1 - e^{-2a/m} det(Σ̂^{-1}(q))^{1/m}) over a grid
/// that is log-spaced toward both q → 0 and q → ‖F‖∞^{-2}, with endpoints
/// 1e-6 relative inside (0, ‖F‖∞^{-2}). The admissible q-range is located by
/// its own bisection on Riccati feasibility. An upper bound on |||F|||_a.
GridOracleResult grid_oracle(const StateSpaceModel& F, double a, int grid_size);
double grid_oracle_norm(const StateSpaceModel& F, double a, int grid_size);

/// Largest ‖FG‖₂/‖G‖₂ over `samples` seeded random shaping filters blended
/// down to mean anisotropy <= a. A lower bound on |||F|||_a. Sample i draws
/// from an RNG seeded by (seed, i), so the result is schedule independent.
double monte_carlo_lower_bound(const StateSpaceModel& F, double a, int samples,
                               std::uint64_t seed);

/// Monotonicity of |||F|||_a along a_list, the H2/H∞ sandwich, and the
/// limiting-case witness inequalities (trace bound and Lyapunov inequality).
Report limits_check(const StateSpaceModel& F, const std::vector<double>& a_list,
                    double tol = 1e-9);

/// max(0, γ̂((η₁+η₂)/2) - (γ̂(η₁)+γ̂(η₂))/2) / (1 + |γ̂((η₁+η₂)/2)|).
double convexity_violation(const StateSpaceModel& F, double a, double eta1, double eta2);

struct ConvexityProbeResult {
  double worst_violation = 0.0;
  int triples = 0;
  Report report;
};

/// Midpoint convexity of γ̂(η) on seeded random pairs drawn log-uniformly
/// from the feasible η-range.
ConvexityProbeResult convexity_probe(const StateSpaceModel& F, double a, int n_triples,
                                     std::uint64_t seed, double bound = 1e-7);

}  // namespace aninorm
