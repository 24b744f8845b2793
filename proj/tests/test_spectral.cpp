#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "hopfdbc/spectral.hpp"
#include "test_support.hpp"

using namespace hopfdbc;
using testing_support::Gen;
using testing_support::sup_norm;

namespace {

std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

TEST(Spectrum, SingleCosineMode) {
  const auto p = PeriodicProfile::sample(8, [](double s) { return std::cos(s); });
  for (int l = -3; l <= 4; ++l) {
    const double expected = std::abs(l) == 1 ? 0.5 : 0.0;
    EXPECT_NEAR(std::abs(p.coefficient(l) - expected), 0.0, 1e-15) << l;
  }
}

TEST(Spectrum, ConstantProfile) {
  const PeriodicProfile p(std::vector<double>(16, 2.5));
  EXPECT_NEAR(p.coefficient(0).real(), 2.5, 1e-15);
  for (int l = 1; l <= 8; ++l) EXPECT_NEAR(std::abs(p.coefficient(l)), 0.0, 1e-15);
}

TEST(Spectrum, RoundTripRandom) {
  Gen g(31);
  const auto v = g.vector(2048, -1, 1);
  const PeriodicProfile p(v);
  const auto q = PeriodicProfile::from_spectrum(p.spectrum());
  EXPECT_LE(sup_norm(diff(q.values(), v)), 1e-12);
  EXPECT_EQ(hermitian_defect(p.spectrum()), 0.0);
}

TEST(Spectrum, NonHermitianCoefficientsRejected) {
  Spectrum c(8, cplx(0, 0));
  c[1] = cplx(1, 0);
  EXPECT_THROW(PeriodicProfile::from_spectrum(c), std::invalid_argument);
}

TEST(Spectrum, GridSizeMustBePowerOfTwo) {
  EXPECT_THROW(PeriodicProfile(std::vector<double>(12, 0.0)), std::invalid_argument);
}

TEST(ApplyD, DerivativeOfCosine) {
  const auto p = PeriodicProfile::sample(32, [](double s) { return std::cos(s); });
  const auto q = apply_D(2.0, p);
  for (std::size_t j = 0; j < 32; ++j) EXPECT_NEAR(q[j], -2.0 * std::sin(grid_point(j, 32)), 1e-14);
  const auto c = apply_D(3.0, PeriodicProfile(std::vector<double>(32, 1.0)));
  EXPECT_LE(sup_norm(c.values()), 1e-15);
}

TEST(ApplyD, DiagonalOnThirdHarmonic) {
  const cplx a(0.3, -0.2);
  const auto p = PeriodicProfile::sample(32, [&](double s) { return 2.0 * (a * std::exp(cplx(0, 3 * s))).real(); });
  const auto q = apply_D(1.7, p);
  EXPECT_LE(std::abs(q.coefficient(3) - cplx(0, 3 * 1.7) * a), 1e-14);
}

TEST(ApplyDhalf, SymbolValues) {
  const cplx i(0, 1);
  EXPECT_LE(std::abs(dtn_symbol(1.0, 0.0, 1) - std::sqrt(0.5) * (1.0 + i)), 1e-15);
  EXPECT_LE(std::abs(dtn_symbol(1.0, 0.0, -2) - (1.0 - i)), 1e-15);
  EXPECT_DOUBLE_EQ(dtn_symbol(1.0, 0.3, 0).real(), 0.3);
  const auto c = apply_Dhalf(1.0, 0.3, PeriodicProfile(std::vector<double>(16, 1.0)));
  for (double v : c.values()) EXPECT_NEAR(v, 0.3, 1e-15);
}

TEST(ApplyDhalf, CosineMapsToRotatedMode) {
  // D^{1/2} cos(s) at omega = 1: Re(sqrt(i) e^{is}) = (cos s - sin s) / sqrt 2.
  const auto p = PeriodicProfile::sample(64, [](double s) { return std::cos(s); });
  const auto q = apply_Dhalf(1.0, 0.0, p);
  for (std::size_t j = 0; j < 64; ++j) {
    const double s = grid_point(j, 64);
    EXPECT_NEAR(q[j], (std::cos(s) - std::sin(s)) / std::numbers::sqrt2, 1e-14);
  }
}

TEST(ApplyDhalf, SquareEqualsTimeDerivativeWithoutDegradation) {
  Gen g(32);
  const PeriodicProfile p(g.trig_poly(64, 20, 1.0));
  const auto twice = apply_Dhalf(1.3, 0.0, apply_Dhalf(1.3, 0.0, p));
  const auto once = apply_D(1.3, p);
  // Zero mode: sigma^2 = 0 on both sides.
  EXPECT_LE(sup_norm(diff(twice.values(), once.values())), 1e-12);
}

TEST(ApplyDhalf, TranslationEquivariance) {
  Gen g(33);
  for (int trial = 0; trial < 20; ++trial) {
    const PeriodicProfile p(g.trig_poly(32, 10, 1.0));
    const int k = g.integer(1, 31);
    const double omega = g.uniform(0.2, 3), sigma = g.uniform(0, 1);
    const auto a = apply_Dhalf(omega, sigma, p.shifted(k));
    const auto b = apply_Dhalf(omega, sigma, p).shifted(k);
    EXPECT_LE(sup_norm(diff(a.values(), b.values())), 1e-13);
  }
}

TEST(ApplySymbol, NyquistSlotCleared) {
  std::vector<double> v(16);
  for (std::size_t j = 0; j < 16; ++j) v[j] = (j % 2 == 0) ? 1.0 : -1.0;
  const PeriodicProfile p(v);
  EXPECT_NEAR(p.coefficient(8).real(), 1.0, 1e-15);
  const auto q = apply_Dhalf(1.0, 0.5, p);
  EXPECT_LE(sup_norm(q.values()), 1e-15);
}

TEST(DtnSymbol, OmegaDerivativeMatchesDifferences) {
  for (int l : {-3, -1, 1, 2, 5}) {
    const double h = 1e-6;
    const cplx fd = (dtn_symbol(1.2 + h, 0.4, l) - dtn_symbol(1.2 - h, 0.4, l)) / (2 * h);
    EXPECT_LE(std::abs(dtn_symbol_domega(1.2, 0.4, l) - fd), 1e-8);
  }
}

TEST(FloquetSymbol, Values) {
  EXPECT_LE(std::abs(floquet_symbol(1.0, cplx(0.04, 0), 1) - std::sqrt(cplx(0.04, 1.0))), 1e-15);
  EXPECT_NEAR(floquet_symbol(4.0, cplx(0.09, 0), 0).real(), 0.6, 1e-15);
  EXPECT_EQ(std::abs(floquet_symbol(2.0, cplx(0, 0), 0)), 0.0);
  EXPECT_THROW(floquet_symbol(1.0, cplx(-0.1, 0), 0), BranchCutError);
}

TEST(FloquetSymbol, ReducesToDtnAtZeroExponent) {
  for (int l = -4; l <= 4; ++l) {
    if (l == 0) continue;
    EXPECT_LE(std::abs(floquet_symbol(1.7, cplx(0, 0), l) - dtn_symbol(1.7, 0.0, l)), 1e-15);
  }
}

TEST(FloquetSymbol, RhoFormAgreesForPrincipalRoot) {
  Gen g(34);
  for (int trial = 0; trial < 50; ++trial) {
    const cplx lambda(g.uniform(0.01, 0.5), g.uniform(-0.3, 0.3));
    const cplx rho = std::sqrt(lambda);
    for (int l = -3; l <= 3; ++l) {
      EXPECT_LE(std::abs(floquet_symbol_rho(1.1, rho, l) - floquet_symbol(1.1, lambda, l)), 1e-13);
    }
  }
}

TEST(FloquetSymbol, AppliesToComplexGridData) {
  std::vector<cplx> e1(16);
  for (std::size_t j = 0; j < 16; ++j) e1[j] = std::exp(cplx(0, grid_point(j, 16)));
  const auto out = apply_Dhalf_floquet(1.0, cplx(0.04, 0), e1);
  for (std::size_t j = 0; j < 16; ++j) EXPECT_LE(std::abs(out[j] - std::sqrt(cplx(0.04, 1.0)) * e1[j]), 1e-14);
}

TEST(Padding, ProductOfBandLimitedFunctionsIsExact) {
  Gen g(35);
  const std::size_t n = 64;
  const PeriodicProfile a(g.trig_poly(n, 15, 1.0)), b(g.trig_poly(n, 15, 1.0));
  const auto pa = padded_samples(a.spectrum()), pb = padded_samples(b.spectrum());
  std::vector<double> prod(pa.size());
  for (std::size_t j = 0; j < prod.size(); ++j) prod[j] = pa[j] * pb[j];
  const auto c = PeriodicProfile::from_spectrum(from_padded_samples(prod, n));
  for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(c[j], a[j] * b[j], 1e-13);
}

TEST(Amplitude, FirstHarmonicOnly) {
  const auto p = PeriodicProfile::sample(32, [](double s) { return 0.7 * std::cos(s) + 3.0; });
  EXPECT_NEAR(amplitude(p), 0.7, 1e-15);
  const auto q = PeriodicProfile::sample(32, [](double s) { return 0.4 * std::cos(2 * s); });
  EXPECT_NEAR(amplitude(q), 0.0, 1e-15);
  const auto r = PeriodicProfile::sample(32, [](double s) { return 0.2 * std::sin(s + 0.3); });
  EXPECT_NEAR(amplitude(r), 0.2, 1e-15);
}

TEST(Shift, MatchesSampledTranslate) {
  const auto p = PeriodicProfile::sample(32, [](double s) { return std::sin(s) + 0.5 * std::cos(3 * s); });
  const auto q = p.shifted(5);
  for (std::size_t j = 0; j < 32; ++j) {
    const double s = grid_point(j, 32) + grid_point(5, 32);
    EXPECT_NEAR(q[j], std::sin(s) + 0.5 * std::cos(3 * s), 1e-14);
  }
}
