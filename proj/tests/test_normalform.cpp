#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hopfdbc/normalform.hpp"

using namespace hopfdbc;

namespace {
constexpr double rt2 = std::numbers::sqrt2;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}  // namespace

TEST(LambdaCoeffs, UnitAlphaWithoutDegradation) {
  const CubicKinetics k(1, 1, 0);
  const auto c = lambda_coeffs(k, cubic_hopf(k, 0.0));
  EXPECT_LE(std::abs(c.lambda0 - cplx(1, 0)), 1e-14);
  EXPECT_LE(std::abs(c.lambda2 - cplx(1 - rt2, 2 - rt2)), 1e-13);
  EXPECT_LE(std::abs(c.lambda1_omega - cplx(-0.5, 0.5)), 1e-13);
}

TEST(LambdaCoeffs, IndependentOverTheReals) {
  for (double alpha : {0.5, 1.0, 3.0}) {
    for (double sigma : {0.0, 0.2, 0.4}) {
      const CubicKinetics k(alpha, 0.3, 0.1);
      const auto c = lambda_coeffs(k, cubic_hopf(k, sigma));
      EXPECT_GT(std::abs((c.lambda1_omega * std::conj(c.lambda1_mu)).imag()), 1e-3);
    }
  }
}

TEST(Mu2Omega2, ClosedFormExamples) {
  const auto a = mu2_omega2(1, 1, 0, 0);
  EXPECT_NEAR(a.mu2, 1.0 / 3.0 - 1.0 / (2.0 * rt2), 1e-12);
  EXPECT_NEAR(a.omega2, -7.0 / 6.0, 1e-12);
  EXPECT_NEAR(a.uinf2, 0.5, 1e-12);
  EXPECT_NEAR(a.mu2, -0.020220, 5e-7);

  const auto b = mu2_omega2(1, 0, 1, 0);
  EXPECT_NEAR(b.mu2, -3.0 / (4.0 * rt2), 1e-12);
  EXPECT_NEAR(b.omega2, -0.75, 1e-12);
  EXPECT_NEAR(b.uinf2, 0.0, 1e-15);

  const auto c = mu2_omega2(1, 0, -1, 0);
  EXPECT_NEAR(c.mu2, 0.530330, 5e-7);
  EXPECT_NEAR(c.omega2, 0.75, 1e-12);
}

TEST(Mu2Omega2, Sigma0ClosedFormValues) {
  EXPECT_NEAR(mu2_omega2_sigma0(1, 1, 0).mu2, -0.020220, 5e-7);
  EXPECT_NEAR(mu2_omega2_sigma0(1, 5, -0.1).mu2, 25 * (1.0 / 3 - 1 / (2 * rt2)) + 0.3 / (4 * rt2), 1e-12);
  EXPECT_NEAR(mu2_omega2_sigma0(1, 5, -0.1).mu2, -0.452, 1e-3);
  EXPECT_NEAR(mu2_omega2_sigma0(4, 0, -1).mu2, 0.2652, 1e-4);
  EXPECT_THROW(mu2_omega2_sigma0(0, 1, 1), std::invalid_argument);
}

TEST(Mu2Omega2, GeneralSolveAgreesWithClosedFormsOnGrid) {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double beta : {0.0, 1.0, 5.0}) {
      for (double gamma : {-1.0, -0.1, 0.0, 1.0}) {
        const auto g = mu2_omega2(alpha, beta, gamma, 0.0);
        const auto c = mu2_omega2_sigma0(alpha, beta, gamma);
        auto close = [](double x, double y) { return y == 0.0 ? std::abs(x) <= 1e-15 : rel(x, y) <= 1e-12; };
        EXPECT_TRUE(close(g.mu2, c.mu2)) << alpha << ' ' << beta << ' ' << gamma << ": " << g.mu2 << " vs " << c.mu2;
        EXPECT_TRUE(close(g.omega2, c.omega2)) << alpha << ' ' << beta << ' ' << gamma;
        EXPECT_TRUE(close(g.uinf2, c.uinf2)) << alpha << ' ' << beta << ' ' << gamma;
      }
    }
  }
}

TEST(Mu2Omega2, QuotientFormulaCrossCheck) {
  for (double sigma : {0.0, 0.3, 0.6}) {
    for (double gamma : {-1.0, 0.4}) {
      const auto e = expansion(CubicKinetics(1.5, 0.8, gamma), sigma);
      const auto [mu2, omega2] = mu2_omega2_quotient(e);
      EXPECT_LE(rel(mu2, e.mu2), 1e-10);
      EXPECT_LE(rel(omega2, e.omega2), 1e-10);
    }
  }
}

TEST(Mu2Omega2, NoHopfWithStrongDegradation) {
  EXPECT_THROW(mu2_omega2(1, 1, 0, 0.8), HopfAbsent);
}

TEST(Expansion, Invariants) {
  for (double sigma : {0.0, 0.25}) {
    const auto e = expansion(CubicKinetics(2, 1.3, -0.2), sigma);
    EXPECT_LE(std::abs(e.v22 - e.beta / (4.0 * e.lambda2)), 1e-15);
    EXPECT_LE(std::abs(e.v20 - (e.beta / (2.0 * e.lambda0)).real()), 1e-15);
    const cplx M = e.beta * e.beta * (1.0 / e.lambda0 + 1.0 / (2.0 * e.lambda2)) + 0.75 * e.gamma;
    EXPECT_LE(std::abs(e.bigM - M), 1e-14);
    EXPECT_DOUBLE_EQ(e.v20, e.uinf2);
    // The r^3 solvability equation is satisfied.
    EXPECT_LE(std::abs(e.lambda1_mu * e.mu2 + e.lambda1_omega * e.omega2 - e.bigM), 1e-13);
  }
}

TEST(GammaCrit, Values) {
  EXPECT_NEAR(gamma_crit(1, 1), 4 * rt2 / 9 - 2.0 / 3, 1e-16);
  EXPECT_NEAR(gamma_crit(1, 1), -0.0381, 5e-5);
  EXPECT_EQ(gamma_crit(1, 0), 0.0);
  EXPECT_NEAR(gamma_crit(2, 2), 2 * (4 * rt2 / 9 - 2.0 / 3), 1e-15);
  EXPECT_NEAR(gamma_crit(2, 2), -0.0763, 5e-5);
}

TEST(GammaCrit, Mu2ChangesSignThere) {
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double beta : {0.5, 1.0, 3.0}) {
      const double g = gamma_crit(alpha, beta);
      const double below = mu2_omega2(alpha, beta, g - 1e-6, 0.0).mu2;
      const double above = mu2_omega2(alpha, beta, g + 1e-6, 0.0).mu2;
      EXPECT_GT(below, 0.0);
      EXPECT_LT(above, 0.0);
    }
  }
}

TEST(InitialProfile, SecondOrderCoefficients) {
  const auto e = expansion(CubicKinetics(1, 1, 0), 0.0);
  const double r = 0.1;
  const auto p = initial_profile(r, e, 64, 2);
  EXPECT_NEAR(p.coefficient(0).real(), r * r / 2, 1e-15);
  // cos(2s) coefficient is 2 Re c_2.
  EXPECT_NEAR(2.0 * p.coefficient(2).real(), -(r * r / 2) * (1 + rt2) / 3, 1e-15);
  EXPECT_NEAR(amplitude(p), r, 1e-15);
}

TEST(InitialProfile, FirstOrderAmplitude) {
  for (double r : {0.0, 0.01, 0.3}) {
    const auto e = expansion(CubicKinetics(2, -1, 0.5), 0.3);
    EXPECT_NEAR(amplitude(initial_profile(r, e, 32, 1)), r, 1e-15);
  }
}

TEST(InitialProfile, ThirdOrderOnlyWithoutDegradation) {
  const CubicKinetics k(1, 1, 0);
  EXPECT_THROW(initial_profile(0.1, expansion(k, 0.2), 32, 3), std::invalid_argument);
  EXPECT_THROW(initial_profile(-0.1, expansion(k, 0.0), 32, 2), std::invalid_argument);
  EXPECT_THROW(initial_profile(0.1, expansion(k, 0.0), 32, 4), std::invalid_argument);
  const auto p = initial_profile(0.1, expansion(k, 0.0), 32, 3);
  EXPECT_GT(std::abs(p.coefficient(3)), 0.0);
}
