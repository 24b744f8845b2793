#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hopfdbc/errors.hpp"
#include "hopfdbc/kinetics.hpp"
#include "hopfdbc/spectral.hpp"

namespace hopfdbc {

/// Periodic orbit candidate: the boundary trace is u_star + profile(s) with
/// s = omega t, at fixed (mu, sigma).
struct BvpState {
  PeriodicProfile profile;  // deviation from the equilibrium u_star
  double omega = 1.0;
  double mu = 0.0;
  double sigma = 0.0;
  double u_star = 0.0;

  std::size_t size() const noexcept { return profile.size(); }
};

/// Recomputes u_star for the state's (mu, sigma), warm-started at the old value.
template <BoundaryKinetics K>
void refresh_equilibrium(BvpState& state, const K& k) {
  state.u_star = equilibrium(k, state.mu, state.sigma, state.u_star);
}

enum class JacobianMode { analytic, finite_difference };

struct NewtonSettings {
  double residual_tol = 1e-10;  // sup norm of residual and phase
  int max_iter = 25;
  JacobianMode jacobian_mode = JacobianMode::analytic;
  double fd_step = 1e-7;
  bool require_nontrivial = true;  // reject starts with a vanishing first mode

  void validate() const {
    if (!(residual_tol > 0.0)) throw std::invalid_argument("NewtonSettings: residual_tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("NewtonSettings: max_iter must be at least 1");
  }
};

/// Integral of sin(s) u(s) over one period (exact for band-limited data).
inline double phase(const PeriodicProfile& p) { return -2.0 * std::numbers::pi * p.coefficient(1).imag(); }

namespace detail {

template <BoundaryKinetics K>
Spectrum reaction_spectrum(const BvpState& st, const K& k, std::span<const cplx> v, std::span<const cplx> flux) {
  const std::size_t n = v.size();
  const auto v_pad = padded_samples(v);
  const auto g_pad = padded_samples(flux);
  std::vector<double> f(v_pad.size());
  const double g0 = st.sigma * st.u_star;
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = k.value(st.u_star + v_pad[j], g0 + g_pad[j], st.mu);
  return from_padded_samples(f, n);
}

inline std::vector<double> real_grid(std::span<const cplx> coeffs) {
  const auto g = inverse_transform(coeffs);
  std::vector<double> out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = g[j].real();
  return out;
}

}  // namespace detail

/// Coefficients of D(omega) v - f(u* + v, sigma u* + D(omega, sigma)^{1/2} v, mu).
///
/// Products are formed on the 2x padded grid and truncated to |l| < n/2. The
/// Nyquist slot, which carries no equation, holds the Nyquist coefficient of v
/// so that the square system pins it to zero.
template <BoundaryKinetics K>
Spectrum residual_spectrum(const BvpState& st, const K& k) {
  const Spectrum& c = st.profile.spectrum();
  const Spectrum dv = apply_D(st.omega, std::span<const cplx>(c));
  const Spectrum flux = apply_Dhalf(st.omega, st.sigma, std::span<const cplx>(c));
  const Spectrum f = detail::reaction_spectrum(st, k, c, flux);
  Spectrum res(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) res[i] = dv[i] - f[i];
  res[c.size() / 2] = c[c.size() / 2];
  return res;
}

template <BoundaryKinetics K>
PeriodicProfile residual(const BvpState& st, const K& k) {
  return PeriodicProfile::from_spectrum(residual_spectrum(st, k));
}

/// Frechet derivative of the residual at a state, applied in spectral space.
template <BoundaryKinetics K>
class Linearization {
 public:
  Linearization(const BvpState& st, const K& k) : st_(st), n_(st.size()) {
    const Spectrum& c = st.profile.spectrum();
    const Spectrum flux = apply_Dhalf(st.omega, st.sigma, std::span<const cplx>(c));
    const auto v_pad = padded_samples(c);
    const auto g_pad = padded_samples(flux);
    d_u_.resize(v_pad.size());
    d_flux_.resize(v_pad.size());
    d_mu_.resize(v_pad.size());
    const double g0 = st.sigma * st.u_star;
    for (std::size_t j = 0; j < v_pad.size(); ++j) {
      const Partials p = k.partials(st.u_star + v_pad[j], g0 + g_pad[j], st.mu);
      d_u_[j] = p.d_u;
      d_flux_[j] = p.d_flux;
      d_mu_[j] = p.d_mu;
    }
    const Partials eq = k.partials(st.u_star, g0, st.mu);
    const double slope = eq.d_u + st.sigma * eq.d_flux;
    du_star_dmu_ = eq.d_mu == 0.0 ? 0.0 : -eq.d_mu / slope;
  }

  /// d residual / d v applied to the coefficients w.
  Spectrum apply(std::span<const cplx> w) const {
    const Spectrum dw = apply_D(st_.omega, w);
    const Spectrum flux = apply_Dhalf(st_.omega, st_.sigma, w);
    Spectrum res = dw;
    subtract_products(res, w, flux);
    res[n_ / 2] = w[n_ / 2];
    return res;
  }

  /// d residual / d omega.
  Spectrum omega_column() const {
    const Spectrum& c = st_.profile.spectrum();
    Spectrum res = apply_symbol(c, [](int l) { return cplx(0.0, static_cast<double>(l)); });
    const Spectrum dflux = apply_symbol(c, [this](int l) { return dtn_symbol_domega(st_.omega, st_.sigma, l); });
    const auto g_pad = padded_samples(dflux);
    std::vector<double> prod(g_pad.size());
    for (std::size_t j = 0; j < prod.size(); ++j) prod[j] = d_flux_[j] * g_pad[j];
    const Spectrum t = from_padded_samples(prod, n_);
    for (std::size_t i = 0; i < n_; ++i) res[i] -= t[i];
    res[n_ / 2] = 0.0;
    return res;
  }

  /// d residual / d mu, including the drift of the equilibrium u*(mu).
  Spectrum mu_column() const {
    std::vector<double> prod(d_mu_.size());
    for (std::size_t j = 0; j < prod.size(); ++j) {
      prod[j] = -(d_mu_[j] + (d_u_[j] + st_.sigma * d_flux_[j]) * du_star_dmu_);
    }
    Spectrum res = from_padded_samples(prod, n_);
    res[n_ / 2] = 0.0;
    return res;
  }

  /// Residual block in grid coordinates (n x n): column j is the response to
  /// a unit value at s_j.
  Eigen::MatrixXd grid_matrix() const {
    Eigen::MatrixXd J(n_, n_);
    std::vector<cplx> unit(n_, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < n_; ++j) {
      unit[j] = 1.0;
      const Spectrum e = forward_transform(std::span<const cplx>(unit));
      unit[j] = 0.0;
      const auto col = detail::real_grid(apply(e));
      for (std::size_t i = 0; i < n_; ++i) J(i, j) = col[i];
    }
    return J;
  }

 private:
  void subtract_products(Spectrum& res, std::span<const cplx> w, std::span<const cplx> flux) const {
    const auto w_pad = padded_samples(w);
    const auto g_pad = padded_samples(flux);
    std::vector<double> prod(w_pad.size());
    for (std::size_t j = 0; j < prod.size(); ++j) prod[j] = d_u_[j] * w_pad[j] + d_flux_[j] * g_pad[j];
    const Spectrum t = from_padded_samples(prod, n_);
    for (std::size_t i = 0; i < n_; ++i) res[i] -= t[i];
  }

  BvpState st_;
  std::size_t n_;
  std::vector<double> d_u_, d_flux_, d_mu_;
  double du_star_dmu_ = 0.0;
};

/// Gradient of the phase functional with respect to the grid values.
inline Eigen::VectorXd phase_gradient(std::size_t n) {
  Eigen::VectorXd g(n);
  const double w = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) g(j) = w * std::sin(grid_point(j, n));
  return g;
}

/// Bordered Jacobian of (residual, phase) in (grid values, omega): size (n+1)^2.
template <BoundaryKinetics K>
Eigen::MatrixXd jacobian(const BvpState& st, const K& k, JacobianMode mode = JacobianMode::analytic,
                         double fd_step = 1e-7) {
  const std::size_t n = st.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 1, n + 1);
  if (mode == JacobianMode::analytic) {
    const Linearization<K> lin(st, k);
    J.topLeftCorner(n, n) = lin.grid_matrix();
    const auto col = detail::real_grid(lin.omega_column());
    for (std::size_t i = 0; i < n; ++i) J(i, n) = col[i];
  } else {
    std::vector<double> v = st.profile.values();
    BvpState probe = st;
    for (std::size_t j = 0; j < n; ++j) {
      const double h = fd_step * std::max(1.0, std::abs(v[j]));
      const double vj = v[j];
      v[j] = vj + h;
      probe.profile = PeriodicProfile(v);
      const auto rp = residual(probe, k).values();
      v[j] = vj - h;
      probe.profile = PeriodicProfile(v);
      const auto rm = residual(probe, k).values();
      v[j] = vj;
      for (std::size_t i = 0; i < n; ++i) J(i, j) = (rp[i] - rm[i]) / (2.0 * h);
    }
    probe.profile = st.profile;
    const double h = fd_step * std::max(1.0, st.omega);
    probe.omega = st.omega + h;
    const auto rp = residual(probe, k).values();
    probe.omega = st.omega - h;
    const auto rm = residual(probe, k).values();
    for (std::size_t i = 0; i < n; ++i) J(i, n) = (rp[i] - rm[i]) / (2.0 * h);
  }
  J.block(n, 0, 1, n) = phase_gradient(n).transpose();
  return J;
}

namespace detail {

inline Eigen::VectorXd solve_dense(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  if (!(lu.rcond() > 1e-14)) throw SingularSystem("Newton: Jacobian is numerically singular");
  return lu.solve(b);
}

}  // namespace detail

struct NewtonResult {
  BvpState state;
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> history;  // residual sup norm before each step
};

/// Newton's method for the periodic boundary-integral equation plus phase
/// condition, unknowns (grid values, omega) at fixed (mu, sigma).
template <BoundaryKinetics K>
NewtonResult newton_solve(const BvpState& initial, const K& k, const NewtonSettings& settings = {}) {
  settings.validate();
  if (!(initial.omega > 0.0)) throw std::invalid_argument("newton_solve: omega must be positive");
  if (settings.require_nontrivial && std::abs(initial.profile.coefficient(1)) < 1e-8) {
    throw std::invalid_argument("newton_solve: first Fourier mode vanishes, phase condition cannot pin the orbit");
  }
  NewtonResult out{initial, 0, 0.0, {}};
  BvpState& st = out.state;
  const std::size_t n = st.size();
  for (int it = 0;; ++it) {
    const auto res = residual(st, k).values();
    double norm = std::abs(phase(st.profile));
    for (double r : res) norm = std::max(norm, std::abs(r));
    if (!std::isfinite(norm)) throw NoConvergence("newton_solve: residual is not finite", it, norm);
    out.history.push_back(norm);
    out.iterations = it;
    out.residual_norm = norm;
    if (norm <= settings.residual_tol) return out;
    if (it == settings.max_iter) break;

    Eigen::VectorXd F(n + 1);
    for (std::size_t i = 0; i < n; ++i) F(i) = res[i];
    F(n) = phase(st.profile);
    const Eigen::VectorXd dx = detail::solve_dense(jacobian(st, k, settings.jacobian_mode, settings.fd_step), F);
    std::vector<double> v = st.profile.values();
    for (std::size_t i = 0; i < n; ++i) v[i] -= dx(i);
    st.profile = PeriodicProfile(std::move(v));
    st.omega -= dx(n);
    if (!(st.omega > 0.0)) throw NoConvergence("newton_solve: frequency left the positive axis", it + 1, norm);
  }
  throw NoConvergence("newton_solve: no convergence within max_iter", settings.max_iter, out.residual_norm);
}

}  // namespace hopfdbc
