#include <gtest/gtest.h>

#include <cmath>

#include "aninorm/errors.hpp"
#include "aninorm/norms.hpp"
#include "aninorm/riccati.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace aninorm;
using fixtures::mat;

TEST(Riccati, ScalarClosedForm) {
  const auto F = fixtures::scalar_lag();
  const RiccatiSolution s = dare_stabilizing(F, 0.1);
  const double R = (0.85 - std::sqrt(0.3225)) / 2.0;
  EXPECT_NEAR(s.R(0, 0), R, 1e-14);
  EXPECT_NEAR(s.closed_loop(0, 0), 0.5 / (1.0 - R), 1e-13);
  EXPECT_NEAR(s.closed_loop_radius, 0.5 / (1.0 - R), 1e-13);
  EXPECT_NEAR(s.Sigma(0, 0), 1.0 / (1.0 - R), 1e-13);
  EXPECT_LE(s.residual, 1e-14);
}

TEST(Riccati, QZeroGivesZeroSolution) {
  const auto F = fixtures::corpus_member(3);
  const RiccatiSolution s = dare_stabilizing(F, 0.0);
  EXPECT_LE(s.R.norm(), 1e-15);
  EXPECT_NEAR(s.closed_loop_radius, spectral_radius(F.A()), 1e-12);
}

TEST(Riccati, NoSolutionAtOrBeyondHinfBoundary) {
  const auto F = fixtures::scalar_lag();
  EXPECT_THROW(dare_stabilizing(F, 0.25 * (1.0 + 1e-6)), NoStabilizingSolution);
  EXPECT_THROW(dare_stabilizing(F, 0.3), NoStabilizingSolution);
  EXPECT_NO_THROW(dare_stabilizing(F, 0.2499));
}

TEST(Riccati, InvalidArguments) {
  const auto F = fixtures::scalar_lag();
  EXPECT_THROW(dare_stabilizing(F, -1.0), std::invalid_argument);
  EXPECT_THROW(dare_stabilizing(F, NAN), std::invalid_argument);
}

TEST(Riccati, ResidualFunction) {
  const auto F = fixtures::scalar_lag();
  EXPECT_NEAR(riccati_residual(F, 0.1, mat({{0.0}})), 0.1, 1e-15);
  EXPECT_THROW(riccati_residual(F, 0.1, mat({{1.5}})), NotPositiveDefinite);
}

TEST(Riccati, CorpusAgainstOracleDefect) {
  for (int k = 0; k < 18; ++k) {
    const auto F = fixtures::corpus_member(k);
    const double hinf = hinf_norm(F);
    for (double frac : {0.3, 0.6, 0.9, 0.999}) {
      const double q = frac / (hinf * hinf);
      const RiccatiSolution s = dare_stabilizing(F, q);
      const Matrix defect = oracle::riccati_defect(F, q, s.R);
      EXPECT_LE(defect.norm(), 1e-10 * (1.0 + s.R.norm())) << "k=" << k << " frac=" << frac;
      EXPECT_LT(s.closed_loop_radius, 1.0);
      EXPECT_GT(min_eigenvalue_symmetric(s.Sigma_inverse), 0.0);
      EXPECT_GE(min_eigenvalue_symmetric(s.R), -1e-12);
      const Matrix closed = F.A() + F.B() * s.L;
      EXPECT_LE((closed - s.closed_loop).norm(), 1e-12 * (1.0 + closed.norm()));
    }
  }
}

TEST(Riccati, MonotoneInQ) {
  for (int k = 0; k < 12; ++k) {
    const auto F = fixtures::corpus_member(k);
    const double qmax = 1.0 / std::pow(hinf_norm(F), 2);
    Matrix previous = Matrix::Zero(F.states(), F.states());
    for (double frac : {0.1, 0.4, 0.7, 0.95}) {
      const Matrix R = dare_stabilizing(F, frac * qmax).R;
      EXPECT_GE(min_eigenvalue_symmetric(R - previous), -1e-9) << "k=" << k;
      previous = R;
    }
  }
}

TEST(Riccati, ExtraWeightRaisesSolution) {
  const auto F = fixtures::corpus_member(4);
  const double q = 0.5 / std::pow(hinf_norm(F), 2);
  const Index n = F.states();
  const Matrix W = 1e-3 * Matrix::Identity(n, n);
  const RiccatiSolution plain = dare_stabilizing(F, q);
  const RiccatiSolution weighted = dare_stabilizing(F, q, W);
  EXPECT_LE(riccati_residual(F, q, weighted.R, W), 1e-10);
  EXPECT_GT(min_eigenvalue_symmetric(weighted.R - plain.R), 0.0);
}
