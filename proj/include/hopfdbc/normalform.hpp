#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "hopfdbc/dispersion.hpp"
#include "hopfdbc/errors.hpp"
#include "hopfdbc/kinetics.hpp"
#include "hopfdbc/spectral.hpp"

namespace hopfdbc {

/// Closed-form Hopf frequency of the cubic kinetics, sqrt(alpha (alpha - 2 sigma^2)).
/// Throws HopfAbsent unless alpha > 2 sigma^2.
inline double cubic_hopf_frequency(double alpha, double sigma) {
  if (!(alpha > 2.0 * sigma * sigma)) {
    throw HopfAbsent("no Hopf point: requires alpha > 2 sigma^2 (alpha = " + std::to_string(alpha) +
                     ", sigma = " + std::to_string(sigma) + ")");
  }
  return std::sqrt(alpha * (alpha - 2.0 * sigma * sigma));
}

/// Hopf point of the cubic kinetics, refined from the closed-form guess.
inline HopfPoint cubic_hopf(const CubicKinetics& k, double sigma) {
  return find_hopf(k, sigma, cubic_hopf_frequency(k.alpha(), sigma), 0.0);
}

/// Action of the critical linearization on Fourier modes.
struct LinearCoefficients {
  cplx lambda0;        // d(0; 0, sigma)
  cplx lambda2;        // d(2 i omega_*; 0, sigma)
  cplx lambda3;        // d(3 i omega_*; 0, sigma)
  cplx lambda1_mu;     // d_mu d(i omega_*)
  cplx lambda1_omega;  // i d_lambda d(i omega_*)
};

/// Everything needed to describe the bifurcating branch of the cubic example
/// to second order in the amplitude r.
struct ExpansionCoefficients {
  double alpha = 0.0, beta = 0.0, gamma = 0.0, sigma = 0.0;
  double omega_star = 0.0;
  double mu_star = 0.0;
  cplx lambda0, lambda2, lambda3, lambda1_mu, lambda1_omega;
  double v20 = 0.0;  // constant second-order mode
  cplx v22;          // coefficient of exp(2is) at order r^2
  cplx bigM;
  double mu2 = 0.0, omega2 = 0.0, uinf2 = 0.0;
  double gamma_crit = 0.0;
};

inline LinearCoefficients lambda_coeffs(const CubicKinetics& k, const HopfPoint& hopf) {
  const double w = hopf.omega_star, s = hopf.sigma_star;
  LinearCoefficients c;
  c.lambda0 = char_fn(k, cplx(0.0, 0.0), hopf.mu_star, s);
  c.lambda2 = char_fn(k, cplx(0.0, 2.0 * w), hopf.mu_star, s);
  c.lambda3 = char_fn(k, cplx(0.0, 3.0 * w), hopf.mu_star, s);
  c.lambda1_mu = hopf.d_mu;
  c.lambda1_omega = cplx(0.0, 1.0) * hopf.d_lambda;
  return c;
}

/// The r^3 solvability condition  lambda1_mu mu2 + lambda1_omega omega2 = M
/// solved as a real 2x2 system.
inline std::pair<double, double> solve_cubic_order(cplx lambda1_mu, cplx lambda1_omega, cplx bigM) {
  const double det = lambda1_mu.real() * lambda1_omega.imag() - lambda1_omega.real() * lambda1_mu.imag();
  const double scale = std::abs(lambda1_mu) * std::abs(lambda1_omega);
  if (!(std::abs(det) > 1e-14 * scale)) {
    throw SingularSystem("expansion: mu- and omega-derivatives of d are linearly dependent over R");
  }
  const double mu2 = (bigM.real() * lambda1_omega.imag() - lambda1_omega.real() * bigM.imag()) / det;
  const double omega2 = (lambda1_mu.real() * bigM.imag() - bigM.real() * lambda1_mu.imag()) / det;
  return {mu2, omega2};
}

/// gamma at which mu2 changes sign for sigma = 0: (beta^2/alpha)(4 sqrt2/9 - 2/3).
inline double gamma_crit(double alpha, double beta) {
  return beta * beta / alpha * (4.0 * std::numbers::sqrt2 / 9.0 - 2.0 / 3.0);
}

inline ExpansionCoefficients expansion(const CubicKinetics& k, const HopfPoint& hopf) {
  ExpansionCoefficients e;
  e.alpha = k.alpha();
  e.beta = k.beta();
  e.gamma = k.gamma();
  e.sigma = hopf.sigma_star;
  e.omega_star = hopf.omega_star;
  e.mu_star = hopf.mu_star;
  const LinearCoefficients lin = lambda_coeffs(k, hopf);
  e.lambda0 = lin.lambda0;
  e.lambda2 = lin.lambda2;
  e.lambda3 = lin.lambda3;
  e.lambda1_mu = lin.lambda1_mu;
  e.lambda1_omega = lin.lambda1_omega;
  const double b = e.beta;
  e.v20 = (b / (2.0 * lin.lambda0)).real();
  e.v22 = b / (4.0 * lin.lambda2);
  e.bigM = b * b * (1.0 / lin.lambda0 + 1.0 / (2.0 * lin.lambda2)) + 0.75 * e.gamma;
  std::tie(e.mu2, e.omega2) = solve_cubic_order(lin.lambda1_mu, lin.lambda1_omega, e.bigM);
  e.uinf2 = e.v20;
  e.gamma_crit = gamma_crit(e.alpha, e.beta);
  return e;
}

inline ExpansionCoefficients expansion(const CubicKinetics& k, double sigma) { return expansion(k, cubic_hopf(k, sigma)); }

struct BranchCoefficients {
  double mu2 = 0.0;
  double omega2 = 0.0;
  double uinf2 = 0.0;
};

inline BranchCoefficients mu2_omega2(double alpha, double beta, double gamma, double sigma) {
  const ExpansionCoefficients e = expansion(CubicKinetics(alpha, beta, gamma), sigma);
  return {e.mu2, e.omega2, e.uinf2};
}

/// Quotient formulas for (mu2, omega2) with the mu-coefficient taken as -d_mu d.
/// Agrees with solve_cubic_order; kept as an independent route.
inline std::pair<double, double> mu2_omega2_quotient(const ExpansionCoefficients& e) {
  const cplx l_mu = -e.lambda1_mu, l_om = e.lambda1_omega;
  const double den = (l_om * std::conj(l_mu)).imag();
  return {(e.bigM * std::conj(l_om)).imag() / den, (e.bigM * std::conj(l_mu)).imag() / den};
}

/// Closed forms without degradation.
inline BranchCoefficients mu2_omega2_sigma0(double alpha, double beta, double gamma) {
  if (!(alpha > 0.0)) throw std::invalid_argument("mu2_omega2_sigma0: alpha must be positive");
  const double s2 = std::numbers::sqrt2;
  BranchCoefficients c;
  c.mu2 = (beta * beta / alpha * (1.0 / 3.0 - 1.0 / (2.0 * s2)) - 3.0 * gamma / (4.0 * s2)) / std::sqrt(alpha);
  c.omega2 = -(7.0 * beta * beta / (6.0 * alpha) + 0.75 * gamma);
  c.uinf2 = beta / (2.0 * alpha);
  return c;
}

/// Asymptotic boundary profile at amplitude r.
///
/// order 1: r cos(s); order 2 adds r^2 (v20 + 2 Re(v22 e^{2is})); order 3
/// (sigma = 0 only) adds the third harmonic r^3 2 Re(v33 e^{3is}) with
/// v33 = (beta v22 + gamma / 8) / d(3 i omega_*).
inline PeriodicProfile initial_profile(double r, const ExpansionCoefficients& e, std::size_t n, int order = 2) {
  if (r < 0.0) throw std::invalid_argument("initial_profile: r must be nonnegative");
  if (order < 1 || order > 3) throw std::invalid_argument("initial_profile: order must be 1, 2 or 3");
  if (order == 3 && e.sigma != 0.0) {
    throw std::invalid_argument("initial_profile: third-order terms are only available for sigma = 0");
  }
  const cplx v33 = (e.beta * e.v22 + e.gamma / 8.0) / e.lambda3;
  return PeriodicProfile::sample(n, [&](double s) {
    double v = r * std::cos(s);
    if (order >= 2) v += r * r * (e.v20 + 2.0 * (e.v22 * std::exp(cplx(0.0, 2.0 * s))).real());
    if (order >= 3) v += r * r * r * 2.0 * (v33 * std::exp(cplx(0.0, 3.0 * s))).real();
    return v;
  });
}

}  // namespace hopfdbc
