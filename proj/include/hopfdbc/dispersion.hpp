#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "hopfdbc/errors.hpp"
#include "hopfdbc/kinetics.hpp"
#include "hopfdbc/spectral.hpp"

namespace hopfdbc {

/// Principal sqrt(lambda + sigma^2); throws on the open cut (-inf, 0).
inline cplx bulk_root(cplx lambda, double sigma) {
  const cplx z = lambda + sigma * sigma;
  if (z.imag() == 0.0 && z.real() < 0.0) {
    throw BranchCutError("characteristic function evaluated on the essential spectrum at lambda = " +
                         std::to_string(lambda.real()) + std::to_string(lambda.imag()) + "i");
  }
  return std::sqrt(z);
}

/// Linear coefficients of the boundary equation along the steady branch.
struct SteadyCoefficients {
  double u_star = 0.0;
  double d_u = 0.0;     // d_u f at (u*, sigma u*, mu)
  double d_flux = 0.0;  // d_flux f at (u*, sigma u*, mu)
  double d_u_dmu = 0.0;     // total mu-derivative of d_u along the branch
  double d_flux_dmu = 0.0;  // total mu-derivative of d_flux along the branch
};

template <BoundaryKinetics K>
SteadyCoefficients steady_coefficients(const K& k, double mu, double sigma, double u_guess = 0.0) {
  SteadyCoefficients c;
  c.u_star = equilibrium(k, mu, sigma, u_guess);
  const Partials p = k.partials(c.u_star, sigma * c.u_star, mu);
  c.d_u = p.d_u;
  c.d_flux = p.d_flux;
  // Tangent of the steady branch from implicit differentiation of
  // f(u*(mu), sigma u*(mu), mu) = 0; second derivatives of f along it are
  // exact when the kinetics supply them, central differences otherwise.
  const double slope = p.d_u + sigma * p.d_flux;
  if (slope == 0.0 && p.d_mu != 0.0) throw SingularSystem("steady branch has a fold in mu");
  const double du_dmu = p.d_mu == 0.0 ? 0.0 : -p.d_mu / slope;
  if constexpr (HasSecondPartials<K>) {
    const SecondPartials q = k.second_partials(c.u_star, sigma * c.u_star, mu);
    c.d_u_dmu = (q.d_uu + sigma * q.d_ug) * du_dmu + q.d_umu;
    c.d_flux_dmu = (q.d_ug + sigma * q.d_gg) * du_dmu + q.d_gmu;
    return c;
  }
  const double h = 1e-5 * std::max(1.0, std::abs(mu));
  const double up = c.u_star + h * du_dmu, um = c.u_star - h * du_dmu;
  const Partials pp = k.partials(up, sigma * up, mu + h);
  const Partials pm = k.partials(um, sigma * um, mu - h);
  c.d_u_dmu = (pp.d_u - pm.d_u) / (2.0 * h);
  c.d_flux_dmu = (pp.d_flux - pm.d_flux) / (2.0 * h);
  return c;
}

/// d(lambda; mu, sigma) = lambda - d_u f - d_flux f sqrt(lambda + sigma^2).
template <BoundaryKinetics K>
cplx char_fn(const K& k, cplx lambda, double mu, double sigma, double u_guess = 0.0) {
  const double u = equilibrium(k, mu, sigma, u_guess);
  const Partials p = k.partials(u, sigma * u, mu);
  return lambda - p.d_u - p.d_flux * bulk_root(lambda, sigma);
}

/// Values of d and its lambda- and (total) mu-derivatives at one point.
struct CharacteristicJet {
  cplx value;
  cplx d_lambda;
  cplx d_mu;
};

template <BoundaryKinetics K>
CharacteristicJet char_jet(const K& k, cplx lambda, double mu, double sigma, double u_guess = 0.0) {
  const SteadyCoefficients c = steady_coefficients(k, mu, sigma, u_guess);
  const cplx root = bulk_root(lambda, sigma);
  return {lambda - c.d_u - c.d_flux * root, 1.0 - c.d_flux / (2.0 * root), -c.d_u_dmu - c.d_flux_dmu * root};
}

/// A simple pair of imaginary roots +-i omega_star of d at (mu_star, sigma_star).
struct HopfPoint {
  double omega_star = 0.0;
  double mu_star = 0.0;
  double sigma_star = 0.0;
  double u_star = 0.0;
  cplx d_lambda;  // d_lambda d at i omega_star
  cplx d_mu;      // d_mu d at i omega_star
  double crossing = 0.0;  // Re of d lambda_* / d mu = Re(-d_mu / d_lambda)
};

/// Complex Newton for a root lambda of d(.; mu, sigma) near a guess.
template <BoundaryKinetics K>
cplx solve_root(const K& k, cplx guess, double mu, double sigma, double tol = 1e-13, int max_iter = 50) {
  const SteadyCoefficients c = steady_coefficients(k, mu, sigma);
  cplx lambda = guess;
  for (int it = 0; it < max_iter; ++it) {
    const cplx root = bulk_root(lambda, sigma);
    const cplx value = lambda - c.d_u - c.d_flux * root;
    if (std::abs(value) <= tol) return lambda;
    lambda -= value / (1.0 - c.d_flux / (2.0 * root));
  }
  throw NoConvergence("solve_root: Newton did not converge", max_iter, std::abs(char_fn(k, lambda, mu, sigma)));
}

/// Solves Re d(i omega; mu, sigma) = Im d(i omega; mu, sigma) = 0 for
/// (omega, mu) by damped 2x2 Newton. Throws HopfAbsent when no positive
/// frequency root is reached.
template <BoundaryKinetics K>
HopfPoint find_hopf(const K& k, double sigma, double omega_guess, double mu_guess = 0.0, double tol = 1e-13,
                    int max_iter = 60) {
  double omega = omega_guess, mu = mu_guess, u_guess = 0.0;
  auto jet_at = [&](double w, double m) { return char_jet(k, cplx(0.0, w), m, sigma, u_guess); };
  try {
    CharacteristicJet jet = jet_at(omega, mu);
    for (int it = 0; it < max_iter && std::abs(jet.value) > tol; ++it) {
      // Columns: d/domega = i d_lambda d, d/dmu = d_mu d.
      const cplx a = cplx(0.0, 1.0) * jet.d_lambda, b = jet.d_mu;
      const double det = a.real() * b.imag() - b.real() * a.imag();
      if (det == 0.0 || !std::isfinite(det)) throw SingularSystem("find_hopf: singular 2x2 Jacobian");
      const double fr = jet.value.real(), fi = jet.value.imag();
      const double dw = (b.imag() * fr - b.real() * fi) / det;
      const double dm = (-a.imag() * fr + a.real() * fi) / det;
      double step = 1.0;
      for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
        const double w = omega - step * dw, m = mu - step * dm;
        if (w <= 0.0) continue;
        CharacteristicJet trial = jet_at(w, m);
        if (std::abs(trial.value) < std::abs(jet.value) || ls == 29) {
          omega = w;
          mu = m;
          jet = trial;
          break;
        }
      }
      u_guess = equilibrium(k, mu, sigma, u_guess);
    }
    // A root at omega ~ 0 is a real eigenvalue crossing, not a Hopf point.
    if (!(std::abs(jet.value) <= tol) || !(omega > 1e-8 * std::max(1.0, omega_guess))) {
      throw HopfAbsent("find_hopf: no imaginary root near omega = " + std::to_string(omega_guess) +
                       " for sigma = " + std::to_string(sigma));
    }
    HopfPoint h;
    h.omega_star = omega;
    h.mu_star = mu;
    h.sigma_star = sigma;
    h.u_star = equilibrium(k, mu, sigma, u_guess);
    h.d_lambda = jet.d_lambda;
    h.d_mu = jet.d_mu;
    h.crossing = (-jet.d_mu / jet.d_lambda).real();
    return h;
  } catch (const HopfAbsent&) {
    throw;
  } catch (const NumericalError& e) {
    throw HopfAbsent(std::string("find_hopf: ") + e.what());
  }
}

struct AssumptionScan {
  double omega_max_factor = 10.0;   // scan |omega| <= factor * omega_star
  double step_factor = 1.0 / 200.0;  // grid step = factor * omega_star
  double exclusion_factor = 1.0 / 20.0;
  double margin = 1e-6;
  double root_tol = 1e-10;
  double simple_tol = 1e-10;
};

struct AssumptionReport {
  bool root_ok = false;        // |d(i omega_star)| small
  bool uniqueness_ok = false;  // no other imaginary root
  bool simple_ok = false;      // d_lambda d != 0
  bool crossing_ok = false;    // Re d lambda / d mu != 0
  double root_residual = 0.0;
  double min_off_root = 0.0;   // min |d(i omega)| over the scan away from +-omega_star
  bool all() const { return root_ok && uniqueness_ok && simple_ok && crossing_ok; }
};

/// Checks the imaginary root is isolated, simple and strictly crossing.
///
/// The bounded scan is closed by the growth bound
/// |d(i w)| >= |w| - |d_u f| - |d_flux f| sqrt(|w| + sigma^2) >= |w| / 2 beyond the scan.
template <BoundaryKinetics K>
AssumptionReport check_assumptions(const HopfPoint& h, const K& k, const AssumptionScan& scan = {}) {
  AssumptionReport report;
  if (!(h.omega_star > 0.0)) return report;
  const double sigma = h.sigma_star;
  const SteadyCoefficients c = steady_coefficients(k, h.mu_star, sigma, h.u_star);
  auto d_at = [&](double w) { return cplx(0.0, w) - c.d_u - c.d_flux * bulk_root(cplx(0.0, w), sigma); };

  report.root_residual = std::abs(d_at(h.omega_star));
  report.root_ok = report.root_residual <= scan.root_tol;

  // Scan to the larger of omega_max_factor * omega_star and the frequency past
  // which the growth bound is guaranteed.
  const double a = std::abs(c.d_u), b = std::abs(c.d_flux);
  const double t_bound = b + std::sqrt(b * b + 2.0 * a + sigma * sigma);
  const double w_max = std::max(scan.omega_max_factor * h.omega_star, t_bound * t_bound - sigma * sigma);
  const double dw = scan.step_factor * h.omega_star;
  const double excl = scan.exclusion_factor * h.omega_star;
  double min_off = std::numeric_limits<double>::infinity();
  const int steps = static_cast<int>(std::ceil(w_max / dw));
  for (int j = -steps; j <= steps; ++j) {
    const double w = j * dw;
    if (std::abs(std::abs(w) - h.omega_star) < excl) continue;
    min_off = std::min(min_off, std::abs(d_at(w)));
  }
  const double w_end = steps * dw;
  const double root = std::sqrt(w_end + sigma * sigma);
  const bool dominates = w_end / 2.0 - a - b * root >= 0.0 && root >= b;
  report.min_off_root = min_off;
  report.uniqueness_ok = min_off > scan.margin && dominates;

  const cplx d_lambda = 1.0 - c.d_flux / (2.0 * bulk_root(cplx(0.0, h.omega_star), sigma));
  report.simple_ok = std::abs(d_lambda) > scan.simple_tol;
  const cplx d_mu = -c.d_u_dmu - c.d_flux_dmu * bulk_root(cplx(0.0, h.omega_star), sigma);
  report.crossing_ok = report.simple_ok && std::abs((-d_mu / d_lambda).real()) > scan.simple_tol;
  return report;
}

}  // namespace hopfdbc
