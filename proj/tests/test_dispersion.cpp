#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "hopfdbc/dispersion.hpp"
#include "hopfdbc/normalform.hpp"
#include "test_support.hpp"

using namespace hopfdbc;
using testing_support::Gen;

namespace {
const double s2 = std::numbers::sqrt2;
}

TEST(CharFn, SampleValues) {
  const CubicKinetics k(1, 1, 0);
  EXPECT_NEAR(std::abs(char_fn(k, cplx(0, 0), 0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_LE(std::abs(char_fn(k, cplx(0, 1), 0, 0)), 1e-15);
  EXPECT_LE(std::abs(char_fn(k, cplx(0, 2), 0, 0) - cplx(1 - s2, 2 - s2)), 1e-14);
}

TEST(CharFn, BranchCutIsRejected) {
  const CubicKinetics k(1, 0, 0);
  EXPECT_THROW(char_fn(k, cplx(-0.5, 0.0), 0, 0), BranchCutError);
  EXPECT_THROW(char_fn(k, cplx(-0.5, 0.0), 0, 0.5), BranchCutError);
  EXPECT_NO_THROW(char_fn(k, cplx(-0.2, 0.0), 0, 0.5));
}

TEST(CharFn, ConjugateSymmetry) {
  Gen g(21);
  const CubicKinetics k(1.5, 0.3, -0.2);
  for (int trial = 0; trial < 100; ++trial) {
    const cplx lambda(g.uniform(-2, 2), g.uniform(0.01, 3));
    const double mu = g.uniform(-0.5, 0.5), sigma = g.uniform(0, 1);
    EXPECT_LE(std::abs(char_fn(k, std::conj(lambda), mu, sigma) - std::conj(char_fn(k, lambda, mu, sigma))), 1e-13);
  }
}

TEST(CharJet, DerivativesMatchFiniteDifferences) {
  Gen g(22);
  const CubicKinetics k(1.0, 0.5, 0.5);
  for (int trial = 0; trial < 30; ++trial) {
    const cplx lambda(g.uniform(-0.5, 1), g.uniform(0.2, 2));
    const double mu = g.uniform(-0.3, 0.3), sigma = g.uniform(0, 0.6);
    const CharacteristicJet jet = char_jet(k, lambda, mu, sigma);
    const double h = 1e-6;
    const cplx dl = (char_fn(k, lambda + h, mu, sigma) - char_fn(k, lambda - h, mu, sigma)) / (2 * h);
    const cplx dm = (char_fn(k, lambda, mu + h, sigma) - char_fn(k, lambda, mu - h, sigma)) / (2 * h);
    EXPECT_LE(std::abs(jet.d_lambda - dl), 1e-7);
    EXPECT_LE(std::abs(jet.d_mu - dm), 1e-7);
  }
}

TEST(FindHopf, UnitAlphaWithoutDegradation) {
  const CubicKinetics k(1, 1, 0);
  const HopfPoint h = find_hopf(k, 0.0, 0.9, 0.05);
  EXPECT_NEAR(h.omega_star, 1.0, 1e-12);
  EXPECT_NEAR(h.mu_star, 0.0, 1e-12);
  EXPECT_LE(std::abs(char_fn(k, cplx(0, h.omega_star), h.mu_star, 0)), 1e-10);
  EXPECT_NEAR(h.crossing, s2, 1e-8);
}

TEST(FindHopf, WithDegradation) {
  const HopfPoint h = find_hopf(CubicKinetics(1, 0, 1), 0.5, 0.8);
  EXPECT_NEAR(h.omega_star, std::sqrt(0.5), 1e-10);
  EXPECT_NEAR(h.mu_star, 0.0, 1e-10);
}

TEST(FindHopf, FrequencyFormulaProperty) {
  Gen g(23);
  for (int trial = 0; trial < 40; ++trial) {
    const double alpha = g.uniform(0.2, 5);
    const double sigma = g.uniform(0, 0.95) * std::sqrt(alpha / 2);
    const HopfPoint h = cubic_hopf(CubicKinetics(alpha, g.uniform(-2, 2), g.uniform(-2, 2)), sigma);
    EXPECT_NEAR(h.omega_star, std::sqrt(alpha * (alpha - 2 * sigma * sigma)), 1e-9 * alpha);
    EXPECT_NEAR(h.mu_star, 0.0, 1e-10);
    EXPECT_GT(h.crossing, 0.0);
  }
}

TEST(FindHopf, CrossingMatchesClosedExpression) {
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    const HopfPoint h = cubic_hopf(CubicKinetics(alpha, 0, 0), 0.0);
    const cplx i(0, 1);
    const cplx expected = i * alpha / (std::sqrt(i * alpha) - std::sqrt(alpha / 2));
    EXPECT_NEAR(h.crossing, expected.real(), 1e-8);
    EXPECT_GT(h.crossing, 0.0);
  }
}

TEST(FindHopf, AbsentWhenDegradationTooStrong) {
  EXPECT_THROW(cubic_hopf(CubicKinetics(1, 0, 0), 0.8), HopfAbsent);
  EXPECT_THROW(find_hopf(CubicKinetics(1, 0, 0), 0.8, 0.5), HopfAbsent);
}

TEST(CheckAssumptions, PassForCubicExamples) {
  for (double sigma : {0.0, 0.3, 0.6}) {
    const CubicKinetics k(1, 1, 0);
    const AssumptionReport rep = check_assumptions(cubic_hopf(k, sigma), k);
    EXPECT_TRUE(rep.all()) << "sigma = " << sigma;
    EXPECT_GT(rep.min_off_root, 1e-3);
  }
  const CubicKinetics k2(2, -1, 0.5);
  EXPECT_TRUE(check_assumptions(cubic_hopf(k2, 0.2), k2).all());
}

TEST(CheckAssumptions, DecoupledBoundaryFailsRootCheck) {
  const FiniteDifferenceKinetics k([](double u, double, double mu) { return (mu - 1.0) * u; });
  HopfPoint h;
  h.omega_star = 1.0;
  const AssumptionReport rep = check_assumptions(h, k);
  EXPECT_FALSE(rep.root_ok);
  EXPECT_FALSE(rep.all());
}
