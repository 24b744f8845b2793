#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <utility>

#include "hopfdbc/errors.hpp"

namespace hopfdbc {

/// First partial derivatives of a boundary vector field f(u, g, mu), where u
/// is the boundary concentration and g the outer normal flux.
struct Partials {
  double d_u = 0.0;
  double d_flux = 0.0;
  double d_mu = 0.0;
};

/// Boundary kinetics: a scalar rate f(u, g, mu) with its first partials.
template <class K>
concept BoundaryKinetics = requires(const K& k, double u, double g, double mu) {
  { k.value(u, g, mu) } -> std::convertible_to<double>;
  { k.partials(u, g, mu) } -> std::same_as<Partials>;
};

/// Second partials of f that enter mu-derivatives along the steady branch.
struct SecondPartials {
  double d_uu = 0.0, d_ug = 0.0, d_umu = 0.0;
  double d_gg = 0.0, d_gmu = 0.0;
};

/// Kinetics that also supply exact second partials.
template <class K>
concept HasSecondPartials = BoundaryKinetics<K> && requires(const K& k, double u, double g, double mu) {
  { k.second_partials(u, g, mu) } -> std::same_as<SecondPartials>;
};

/// f(u, g, mu) = -alpha u + beta u^2 + gamma u^3 + (mu + sqrt(2 alpha)) g.
///
/// Linear in the flux and with the trivial equilibrium u = 0 for every mu and
/// every degradation rate. The flux coefficient places a Hopf point at mu = 0.
class CubicKinetics {
 public:
  CubicKinetics(double alpha, double beta, double gamma)
      : alpha_(alpha), beta_(beta), gamma_(gamma), flux_gain_(std::sqrt(2.0 * alpha)) {
    if (!(alpha > 0.0)) {
      throw std::invalid_argument("CubicKinetics: alpha must be positive, got " + std::to_string(alpha));
    }
  }

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }

  /// Coefficient of the flux, mu + sqrt(2 alpha).
  double flux_coefficient(double mu) const noexcept { return mu + flux_gain_; }

  double value(double u, double g, double mu) const noexcept {
    return -alpha_ * u + beta_ * u * u + gamma_ * u * u * u + flux_coefficient(mu) * g;
  }

  Partials partials(double u, double g, double mu) const noexcept {
    return {-alpha_ + 2.0 * beta_ * u + 3.0 * gamma_ * u * u, flux_coefficient(mu), g};
  }

  SecondPartials second_partials(double u, double, double) const noexcept {
    return {2.0 * beta_ + 6.0 * gamma_ * u, 0.0, 0.0, 0.0, 1.0};
  }

 private:
  double alpha_;
  double beta_;
  double gamma_;
  double flux_gain_;
};

/// Wraps a plain callable f(u, g, mu) and supplies partials by central
/// differences with step 1e-6 * max(1, |x|).
template <class F>
class FiniteDifferenceKinetics {
 public:
  explicit FiniteDifferenceKinetics(F f) : f_(std::move(f)) {}

  double value(double u, double g, double mu) const { return f_(u, g, mu); }

  Partials partials(double u, double g, double mu) const {
    auto step = [](double x) { return 1e-6 * std::max(1.0, std::abs(x)); };
    const double hu = step(u), hg = step(g), hm = step(mu);
    return {(f_(u + hu, g, mu) - f_(u - hu, g, mu)) / (2.0 * hu),
            (f_(u, g + hg, mu) - f_(u, g - hg, mu)) / (2.0 * hg),
            (f_(u, g, mu + hm) - f_(u, g, mu - hm)) / (2.0 * hm)};
  }

 private:
  F f_;
};

template <class F>
FiniteDifferenceKinetics(F) -> FiniteDifferenceKinetics<F>;

/// Steady boundary value u* solving f(u*, sigma u*, mu) = 0.
///
/// A steady bulk profile is u* exp(-sigma x), so its outer normal flux is
/// sigma u*. Scalar Newton with derivative d_u f + sigma d_flux f.
template <BoundaryKinetics K>
double equilibrium(const K& k, double mu, double sigma, double guess = 0.0, double tol = 1e-12,
                   int max_iter = 50) {
  double u = guess;
  double res = k.value(u, sigma * u, mu);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(res) <= tol) return u;
    const Partials p = k.partials(u, sigma * u, mu);
    const double slope = p.d_u + sigma * p.d_flux;
    if (slope == 0.0 || !std::isfinite(slope)) {
      throw SingularSystem("equilibrium: vanishing derivative of f along the steady branch");
    }
    u -= res / slope;
    res = k.value(u, sigma * u, mu);
  }
  if (std::abs(res) <= tol) return u;
  throw NoConvergence("equilibrium: Newton did not converge", max_iter, std::abs(res));
}

}  // namespace hopfdbc
