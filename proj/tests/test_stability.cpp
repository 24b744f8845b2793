#include <cmath>

#include <gtest/gtest.h>

#include "hopfdbc/stability.hpp"

using namespace hopfdbc;

TEST(Reduced, CoefficientValues) {
  EXPECT_LE(std::abs(reduced_coeffs(1, 0, 0).b - cplx(0.5, 0.5)), 1e-15);
  EXPECT_LE(std::abs(reduced_coeffs(3, 1, 1).b - cplx(1.5, 1.5)), 1e-15);
  const auto rc = reduced_coeffs(1, 1, 0);
  // Independent oracle: -(1 + 1/(2 Lambda_2)) with Lambda_2 = (1 - sqrt2) + (2 - sqrt2) i.
  const cplx lambda2(1 - std::sqrt(2.0), 2 - std::sqrt(2.0));
  const cplx minus_m = -(1.0 + 1.0 / (2.0 * lambda2));
  EXPECT_LE(std::abs(rc.a - minus_m), 1e-14);
  EXPECT_NEAR(rc.a.real(), -0.59763, 1e-5);
  EXPECT_NEAR(rc.a.imag(), 0.56904, 1e-5);
  EXPECT_EQ(rc.a, rc.c);
  EXPECT_LE(std::abs(reduced_coeffs(1, 0, 1).a - cplx(-0.75, 0.0)), 1e-14);
}

TEST(Reduced, AEqualsMinusM) {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double beta : {0.0, 1.0, 2.5}) {
      for (double gamma : {-1.0, 0.0, 0.7}) {
        const auto e = expansion(CubicKinetics(alpha, beta, gamma), 0.0);
        const cplx a = reduced_coeffs(alpha, beta, gamma).a;
        // The printed coefficients carry the alpha dependence of the unit case.
        if (alpha == 1.0) EXPECT_LE(std::abs(a + e.bigM), 1e-12) << beta << ' ' << gamma;
      }
    }
  }
  const auto e = expansion(CubicKinetics(1, 1, 0), 0.0);
  EXPECT_LE(std::abs(e.bigM - cplx(0.59763, -0.56904)), 1e-5);
}

TEST(Leading, Examples) {
  EXPECT_NEAR(leading_eigenvalue(reduced_coeffs(1, 0, 1)), 1.5, 1e-13);
  EXPECT_NEAR(leading_eigenvalue(reduced_coeffs(1, 0, -1)), -1.5, 1e-13);
  const cplx a = reduced_coeffs(1, 1, 0).a, b(0.5, 0.5);
  EXPECT_NEAR(leading_eigenvalue(reduced_coeffs(1, 1, 0)), -2.0 * (a * std::conj(b)).real() / std::norm(b), 1e-15);
  EXPECT_NEAR(leading_eigenvalue(reduced_coeffs(1, 1, 0)), 0.0572, 5e-5);
}

TEST(Leading, SignOppositeToMu2) {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double beta : {0.5, 1.0, 2.0}) {
      const double gc = gamma_crit(alpha, beta);
      for (double gamma : {gc - 0.5, gc - 0.01, gc + 0.01, gc + 0.5}) {
        const double l1 = leading_eigenvalue(reduced_coeffs(alpha, beta, gamma));
        const double mu2 = mu2_omega2(alpha, beta, gamma, 0.0).mu2;
        EXPECT_NE(std::signbit(l1), std::signbit(mu2)) << alpha << ' ' << beta << ' ' << gamma;
      }
    }
  }
}

TEST(FloquetOperatorTest, TrivialOrbitIsDiagonal) {
  const CubicKinetics k(1, 0.7, -0.3);
  BranchPoint p;
  p.profile = PeriodicProfile::zero(32);
  p.omega = 1.0;
  const FloquetOperator op(p, k);
  const cplx rho(0.1, 0.05);
  const auto T = op.matrix(rho, 8);
  for (int l = -8; l <= 8; ++l) {
    for (int m = -8; m <= 8; ++m) {
      const cplx expected = l == m ? char_fn(k, cplx(0, l) + rho * rho, 0.0, 0.0) : cplx(0, 0);
      EXPECT_LE(std::abs(T(l + 8, m + 8) - expected), 1e-13) << l << ' ' << m;
    }
  }
  const auto T0 = op.matrix(cplx(0, 0), 8);
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(T0);
  EXPECT_LE(svd.singularValues()(16), 1e-14);
}

TEST(FloquetOperatorTest, RejectsDegradation) {
  BranchPoint p;
  p.profile = PeriodicProfile::zero(16);
  p.omega = 1.0;
  p.sigma = 0.2;
  EXPECT_THROW(FloquetOperator(p, CubicKinetics(1, 0, 1)), std::invalid_argument);
}

class FloquetNumeric : public ::testing::TestWithParam<double> {};

TEST_P(FloquetNumeric, MatchesReducedExponentNearOnset) {
  const double gamma = GetParam();
  const CubicKinetics k(1, 0, gamma);
  const auto e = expansion(k, 0.0);
  const double r = 0.05;
  const auto point = seed_point(k, e, r, 64);
  const auto res = floquet_numeric(point, k, closed_form_window(e, r));
  EXPECT_LE(res.translation_error, 1e-8);
  const auto lead = leading_nonzero(res);
  ASSERT_TRUE(lead.has_value());
  const double expected = leading_eigenvalue(reduced_coeffs(1, 0, gamma)) * r * r;
  EXPECT_NEAR(lead->real(), expected, 0.1 * std::abs(expected));
  EXPECT_EQ(classify(res), gamma > 0 ? Stability::unstable : Stability::stable);
  for (const auto& l : res.exponents) {
    bool paired = std::abs(l.imag()) < 1e-9;
    for (const auto& m : res.exponents) paired = paired || std::abs(m - std::conj(l)) < 1e-8;
    EXPECT_TRUE(paired) << l;
  }
}

INSTANTIATE_TEST_SUITE_P(Cubic, FloquetNumeric, ::testing::Values(1.0, -1.0));

TEST(Classify, NearOnsetBranchPoints) {
  const auto stable_e = expansion(CubicKinetics(1, 0, -1), 0.0);
  const auto unstable_e = expansion(CubicKinetics(1, 0, 1), 0.0);
  BranchPoint p;
  p.r = 0.02;
  double l1 = 0.0;
  EXPECT_EQ(classify(p, stable_e, 1e-6, &l1), Stability::stable);
  EXPECT_NEAR(l1, -1.5 * 0.02 * 0.02, 1e-14);
  EXPECT_EQ(classify(p, unstable_e), Stability::unstable);
  p.r = 1e-9;
  EXPECT_EQ(classify(p, stable_e), Stability::unknown);
}

TEST(Classify, DegradationUsesMu2Sign) {
  const auto e = expansion(CubicKinetics(1, 0, -1), 0.3);
  BranchPoint p;
  p.r = 0.05;
  EXPECT_EQ(classify(p, e), e.mu2 > 0 ? Stability::stable : Stability::unstable);
}

TEST(Classify, ResolutionRule) {
  FloquetResult f;
  f.exponents = {cplx(0, 0), cplx(1e-10, 0)};
  EXPECT_EQ(classify(f), Stability::unknown);
  f.exponents.push_back(cplx(-2e-3, 0.01));
  f.exponents.push_back(cplx(-2e-3, -0.01));
  EXPECT_EQ(classify(f), Stability::stable);
}
