#include <gtest/gtest.h>

#include <cmath>

#include "aninorm/anisotropy.hpp"
#include "aninorm/errors.hpp"
#include "aninorm/norms.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace aninorm;
using fixtures::mat;

TEST(MeanAnisotropy, OnePoleClosedForm) {
  for (double r : {0.1, 0.5, 0.9}) {
    const double value = mean_anisotropy(ShapingFilter(fixtures::one_pole(r)));
    EXPECT_NEAR(value, oracle::one_pole_anisotropy(r), 1e-8) << "r=" << r;
  }
  EXPECT_NEAR(mean_anisotropy(ShapingFilter(fixtures::one_pole(0.5))), 0.14384103622589045, 1e-10);
}

TEST(MeanAnisotropy, ScalarMultipleOfIdentityIsZero) {
  EXPECT_NEAR(mean_anisotropy(ShapingFilter(StateSpaceModel::static_gain(mat({{3, 0}, {0, 3}})))), 0.0, 1e-14);
}

TEST(MeanAnisotropy, StaticClosedForm) {
  // Ā(diag(1, 2)) = -½ ln(det(2·diag(1, 4)/5)) = -½ ln(16/25)
  const double value = mean_anisotropy(ShapingFilter(StateSpaceModel::static_gain(mat({{1, 0}, {0, 2}}))));
  EXPECT_NEAR(value, -0.5 * std::log(16.0 / 25.0), 1e-13);
}

TEST(MeanAnisotropy, MatchesDenseQuadratureOracle) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto G = random_stable(2, 2, 2, seed, 0.7);
    const double value = mean_anisotropy(ShapingFilter(G));
    EXPECT_NEAR(value, oracle::mean_anisotropy_dense(G), 1e-8) << "seed=" << seed;
  }
}

TEST(MeanAnisotropy, ZeroOnUnitCircleIsInfinite) {
  // G(z) = 1 - z^{-1}
  const StateSpaceModel G(mat({{0}}), mat({{1}}), mat({{-1}}), mat({{1}}));
  EXPECT_TRUE(std::isinf(mean_anisotropy(ShapingFilter(G))));
  EXPECT_TRUE(std::isinf(mean_anisotropy(ShapingFilter(StateSpaceModel::static_gain(mat({{1, 0}, {0, 0}}))))));
}

TEST(MeanAnisotropy, GridSizeValidation) {
  const ShapingFilter G(fixtures::one_pole(0.5));
  EXPECT_THROW(mean_anisotropy(G, 100), std::invalid_argument);
  EXPECT_THROW(mean_anisotropy(G, 32), std::invalid_argument);
  EXPECT_NO_THROW(mean_anisotropy(G, 1024));
}

TEST(MeanAnisotropy, QuadratureFailureWhenGridCapTooSmall) {
  QuadratureOptions options;
  options.max_grid = 128;
  options.initial_grid = 64;
  EXPECT_THROW(mean_anisotropy(ShapingFilter(fixtures::one_pole(0.99)), 64, options), QuadratureFailure);
}

TEST(ShapingBlend, LandsJustBelowTarget) {
  const ShapingFilter raw(random_stable(2, 3, 3, 11, 0.9));
  const double raw_level = mean_anisotropy(raw);
  ASSERT_GT(raw_level, 0.2);
  const ShapingFilter blended = shaping_blend(raw, 0.2, 1e-4);
  const double level = mean_anisotropy(blended);
  EXPECT_LE(level, 0.2 + 1e-9);
  EXPECT_GE(level, 0.2 - 1e-4 - 1e-9);
  EXPECT_TRUE(shaping_blend(raw, raw_level + 1.0, 1e-4).model() == raw.model());
}

TEST(EtaProbe, ScalarGammaHat) {
  // m = 1: γ̂(η) = η - e^{-2a}(η - BᵀΦB), Φ = ηR̂(1/η).
  const auto F = fixtures::scalar_lag();
  const double eta = 10.0;
  const double R = (0.85 - std::sqrt(0.3225)) / 2.0;
  const double a = 0.3;
  const double expected = eta - std::exp(-2.0 * a) * (eta - eta * R);
  EXPECT_NEAR(gamma_hat_of_eta(F, a, eta), expected, 1e-12);
  EXPECT_THROW(gamma_hat_of_eta(F, a, 3.99), NoStabilizingSolution);
  EXPECT_THROW(gamma_hat_of_eta(F, a, -1.0), std::invalid_argument);
}

TEST(AnisotropicNorm, AZeroIsScaledH2) {
  const auto F = fixtures::scalar_lag();
  const AnisoNormResult r = anisotropic_norm(AnisoQuery{F, 0.0});
  EXPECT_NEAR(r.gamma, std::sqrt(4.0 / 3.0), 1e-14);
  EXPECT_EQ(r.status, AnisoStatus::BoundaryA0);
  EXPECT_TRUE(std::isinf(r.eta_star));
  EXPECT_EQ(r.q_star, 0.0);
  EXPECT_NEAR(r.phi_star(0, 0), 4.0 / 3.0, 1e-14);
}

TEST(AnisotropicNorm, StaticClosedForm) {
  // F = diag(1, 0), a = ln 2: stationary point s = 2 - √3.
  const AnisoNormResult r = anisotropic_norm(AnisoQuery{fixtures::static_diag_one_zero(), std::log(2.0)});
  EXPECT_NEAR(r.gamma, 0.9659258262890683, 1e-9);
  EXPECT_NEAR(r.q_star, 4.0 * std::sqrt(3.0) - 6.0, 1e-6);
  EXPECT_EQ(r.status, AnisoStatus::Converged);
}

TEST(AnisotropicNorm, ScalarLagValue) {
  // Frozen from a 40-digit minimization of the scalar closed form
  // R̂(q) = ((0.75 + q) - sqrt((0.75 + q)² - 4q))/2.
  const AnisoNormResult r = anisotropic_norm(AnisoQuery{fixtures::scalar_lag(), 1.0});
  EXPECT_NEAR(r.gamma, 1.9304990307931, 1e-8);
  EXPECT_GT(r.gamma, r.h2_bound);
  EXPECT_LT(r.gamma, 2.0);
}

TEST(AnisotropicNorm, LargeAApproachesHinf) {
  const auto F = fixtures::scalar_lag();
  const double g30 = anisotropic_norm(AnisoQuery{F, 30.0}).gamma;
  const double g5 = anisotropic_norm(AnisoQuery{F, 5.0}).gamma;
  EXPECT_LT(2.0 - g30, 2.0 - g5);
  EXPECT_LT(2.0 - g30, 1e-6);
}

TEST(AnisotropicNorm, Errors) {
  const StateSpaceModel unstable(mat({{1.2}}), mat({{1}}), mat({{1}}), mat({{0}}));
  EXPECT_THROW(anisotropic_norm(AnisoQuery{unstable, 1.0}), StabilityError);
  EXPECT_THROW(anisotropic_norm(AnisoQuery{fixtures::scalar_lag(), -1.0}), std::invalid_argument);
  AnisoQuery tight{fixtures::scalar_lag(), 1.0};
  tight.max_evaluations = 3;
  EXPECT_THROW(anisotropic_norm(tight), ToleranceNotReached);
}

TEST(AnisotropicNorm, ZeroSystem) {
  const StateSpaceModel F(mat({{0.5}}), mat({{0}}), mat({{0}}), mat({{0}}));
  EXPECT_EQ(anisotropic_norm(AnisoQuery{F, 1.0}).gamma, 0.0);
}

TEST(Feasibility, WitnessSatisfiesBothInequalities) {
  for (int k = 0; k < 6; ++k) {
    const auto F = fixtures::corpus_member(k);
    for (double a : {0.0, 0.5, 3.0}) {
      const double norm = anisotropic_norm(AnisoQuery{F, a}).gamma;
      const FeasibilityResult yes = aninorm_feasible(F, a, norm * 1.01);
      ASSERT_TRUE(yes.feasible) << "k=" << k << " a=" << a;
      ASSERT_TRUE(yes.witness.has_value());
      const FeasibilityWitness& w = *yes.witness;
      const double gamma2 = std::pow(norm * 1.01, 2);
      EXPECT_GT(w.q, 0.0);
      EXPECT_LT(w.q * gamma2, 1.0);
      EXPECT_GT(w.determinant_margin, 0.0);
      EXPECT_LT(w.lmi_max_eigenvalue, 0.0);
      EXPECT_LT(sanbrl_lmi_max_eigenvalue(F, w.q, w.R), 0.0);
      if (F.states() > 0) EXPECT_GT(min_eigenvalue_symmetric(w.R), 0.0);
      // Recompute the determinant condition independently.
      const Index m = F.inputs();
      const Matrix S = Matrix::Identity(m, m) - F.B().transpose() * w.R * F.B() -
                       w.q * F.D().transpose() * F.D();
      const double lhs = std::log(S.determinant());
      const double rhs = double(m) * std::log(1.0 - w.q * gamma2) + 2.0 * a;
      EXPECT_GT(lhs, rhs) << "k=" << k << " a=" << a;

      const FeasibilityResult no = aninorm_feasible(F, a, norm * 0.99);
      EXPECT_FALSE(no.feasible);
      EXPECT_FALSE(no.witness.has_value());
    }
  }
}

TEST(Feasibility, InvalidGamma) {
  EXPECT_THROW(aninorm_feasible(fixtures::scalar_lag(), 1.0, 0.0), std::invalid_argument);
}
