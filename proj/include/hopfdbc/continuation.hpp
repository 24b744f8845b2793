#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hopfdbc/bvp.hpp"
#include "hopfdbc/dispersion.hpp"
#include "hopfdbc/errors.hpp"
#include "hopfdbc/normalform.hpp"

namespace hopfdbc {

enum class Stability { stable, unstable, unknown };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::unknown: break;
  }
  return "unknown";
}

enum class Termination { completed, step_underflow, homoclinic_suspected, newton_failure };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::step_underflow: return "step_underflow";
    case Termination::homoclinic_suspected: return "homoclinic_suspected";
    case Termination::newton_failure: return "newton_failure";
  }
  return "completed";
}

struct BranchPoint {
  double mu = 0.0;
  double omega = 0.0;
  double r = 0.0;      // 2 |c_1|
  double u_inf = 0.0;  // far-field constant u* + c_0
  double sigma = 0.0;
  double u_star = 0.0;
  PeriodicProfile profile;  // deviation from u_star
  Stability stability = Stability::unknown;
  std::optional<double> lambda1;
  int newton_iters = 0;
  double residual = 0.0;

  BvpState state() const { return {profile, omega, mu, sigma, u_star}; }
};

struct Branch {
  std::vector<BranchPoint> points;
  Termination termination = Termination::completed;
};

struct ContinuationSettings {
  double ds0 = 5e-3;
  double ds_min = 1e-7;
  double ds_max = 0.1;
  std::size_t max_points = 2000;
  double omega_min = 1e-3;
  double grow = 2.0;
  double shrink = 0.5;
  int fast_iters = 3;  // grow the step when the corrector needs at most this many
  double residual_tol = 1e-10;
  int corrector_max_iter = 8;
  std::optional<std::pair<double, double>> mu_window;  // stop (completed) outside
  std::optional<std::pair<double, double>> r_window;

  void validate() const {
    if (!(ds_min > 0.0 && ds_min <= ds0 && ds0 <= ds_max)) {
      throw std::invalid_argument("ContinuationSettings: need 0 < ds_min <= ds0 <= ds_max");
    }
    if (!(grow >= 1.0) || !(shrink > 0.0 && shrink < 1.0)) {
      throw std::invalid_argument("ContinuationSettings: need grow >= 1 and 0 < shrink < 1");
    }
    if (max_points < 2) throw std::invalid_argument("ContinuationSettings: max_points must be at least 2");
    if (!(residual_tol > 0.0) || corrector_max_iter < 1) {
      throw std::invalid_argument("ContinuationSettings: invalid corrector settings");
    }
  }
};

inline BranchPoint make_point(const BvpState& st, int iters, double res) {
  BranchPoint p;
  p.mu = st.mu;
  p.omega = st.omega;
  p.sigma = st.sigma;
  p.u_star = st.u_star;
  p.profile = st.profile;
  p.r = amplitude(st.profile);
  p.u_inf = st.u_star + st.profile.coefficient(0).real();
  p.newton_iters = iters;
  p.residual = res;
  return p;
}

namespace detail {

/// Unknowns (grid values, omega, mu) flattened.
inline Eigen::VectorXd pack(const BvpState& st) {
  const std::size_t n = st.size();
  Eigen::VectorXd x(n + 2);
  for (std::size_t i = 0; i < n; ++i) x(i) = st.profile[i];
  x(n) = st.omega;
  x(n + 1) = st.mu;
  return x;
}

inline BvpState unpack(const Eigen::VectorXd& x, double sigma, double u_star) {
  const std::size_t n = static_cast<std::size_t>(x.size()) - 2;
  std::vector<double> v(x.data(), x.data() + n);
  return {PeriodicProfile(std::move(v)), x(n), x(n + 1), sigma, u_star};
}

/// Inner-product weights: profile entries 1/n, omega and mu 1.
inline Eigen::VectorXd arclength_weights(std::size_t n) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n + 2, 1.0 / static_cast<double>(n));
  w(n) = 1.0;
  w(n + 1) = 1.0;
  return w;
}

struct CorrectorOutcome {
  BvpState state;
  int iterations = 0;
  double residual = 0.0;
};

/// Newton on (residual, phase, extra) in (grid values, omega, mu), where the
/// extra scalar equation is linear: row . x = target.
template <BoundaryKinetics K>
CorrectorOutcome bordered_newton(BvpState st, const K& k, const Eigen::VectorXd& row, double target, double tol,
                                 int max_iter) {
  const std::size_t n = st.size();
  double norm = 0.0;
  for (int it = 0;; ++it) {
    refresh_equilibrium(st, k);
    const auto res = residual(st, k).values();
    const Eigen::VectorXd x = pack(st);
    const double extra = row.dot(x) - target;
    norm = std::abs(phase(st.profile));
    for (double r : res) norm = std::max(norm, std::abs(r));
    if (!std::isfinite(norm)) throw NoConvergence("corrector: residual is not finite", it, norm);
    if (norm <= tol && std::abs(extra) <= tol * std::max(1.0, row.lpNorm<Eigen::Infinity>())) return {st, it, norm};
    if (it == max_iter) break;

    const Linearization<K> lin(st, k);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 2, n + 2);
    J.topLeftCorner(n, n) = lin.grid_matrix();
    const auto om = real_grid(lin.omega_column());
    const auto mc = real_grid(lin.mu_column());
    for (std::size_t i = 0; i < n; ++i) {
      J(i, n) = om[i];
      J(i, n + 1) = mc[i];
    }
    J.block(n, 0, 1, n) = phase_gradient(n).transpose();
    J.row(n + 1) = row.transpose();
    Eigen::VectorXd F(n + 2);
    for (std::size_t i = 0; i < n; ++i) F(i) = res[i];
    F(n) = phase(st.profile);
    F(n + 1) = extra;
    const Eigen::VectorXd xn = x - solve_dense(J, F);
    if (!(xn(n) > 0.0)) throw NoConvergence("corrector: frequency left the positive axis", it + 1, norm);
    st = unpack(xn, st.sigma, st.u_star);
  }
  throw NoConvergence("corrector: no convergence", max_iter, norm);
}

}  // namespace detail

/// Converges one branch point with first-mode amplitude pinned at r, starting
/// from the asymptotic guess at (mu_* + mu2 r^2, omega_* + omega2 r^2).
template <BoundaryKinetics K>
BranchPoint seed_point(const K& k, const ExpansionCoefficients& coeffs, double r, std::size_t n, double tol = 1e-10,
                       int max_iter = 25) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("seed_branch: amplitude must be positive, first Fourier mode would vanish");
  }
  BvpState st{initial_profile(r, coeffs, n, 2), coeffs.omega_star + coeffs.omega2 * r * r,
              coeffs.mu_star + coeffs.mu2 * r * r, coeffs.sigma, 0.0};
  st.u_star = equilibrium(k, st.mu, st.sigma);
  // Re c_1 = r / 2 in terms of grid values: (1/n) sum_j v_j cos(s_j).
  Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) + 2);
  for (std::size_t j = 0; j < n; ++j) row(j) = std::cos(grid_point(j, n)) / static_cast<double>(n);
  const auto out = detail::bordered_newton(st, k, row, r / 2.0, tol, max_iter);
  return make_point(out.state, out.iterations, out.residual);
}

template <BoundaryKinetics K>
std::pair<BranchPoint, BranchPoint> seed_branch(const K& k, const ExpansionCoefficients& coeffs, double r0 = 0.01,
                                                double r1 = 0.02, std::size_t n = 256, double tol = 1e-10) {
  if (!(r0 > 0.0) || !(r1 > r0)) {
    throw std::invalid_argument("seed_branch: need 0 < r0 < r1 (a zero amplitude leaves the phase unpinned)");
  }
  return {seed_point(k, coeffs, r0, n, tol), seed_point(k, coeffs, r1, n, tol)};
}

/// Secant continuation from two seeds in the weighted space of (profile, omega, mu).
template <BoundaryKinetics K>
Branch continue_branch(const K& k, const std::pair<BranchPoint, BranchPoint>& seeds,
                       const ContinuationSettings& settings = {}) {
  settings.validate();
  if (seeds.first.profile.size() != seeds.second.profile.size()) {
    throw std::invalid_argument("continue_branch: seeds use different grid sizes");
  }
  const std::size_t n = seeds.first.profile.size();
  const double sigma = seeds.first.sigma;
  const Eigen::VectorXd w = detail::arclength_weights(n);

  Branch branch;
  branch.points = {seeds.first, seeds.second};
  auto inside = [&](const BranchPoint& p) {
    if (settings.mu_window && (p.mu < settings.mu_window->first || p.mu > settings.mu_window->second)) return false;
    if (settings.r_window && (p.r < settings.r_window->first || p.r > settings.r_window->second)) return false;
    return true;
  };

  double ds = settings.ds0;
  bool structural_failure = false;
  while (branch.points.size() < settings.max_points) {
    const BranchPoint& p0 = branch.points[branch.points.size() - 2];
    const BranchPoint& p1 = branch.points.back();
    const Eigen::VectorXd x0 = detail::pack(p0.state()), x1 = detail::pack(p1.state());
    Eigen::VectorXd t = x1 - x0;
    const double len = std::sqrt(t.dot(w.cwiseProduct(t)));
    if (!(len > 0.0)) {
      branch.termination = Termination::newton_failure;
      return branch;
    }
    t /= len;
    const Eigen::VectorXd row = w.cwiseProduct(t);

    bool accepted = false;
    while (!accepted) {
      if (ds < settings.ds_min) {
        branch.termination = structural_failure ? Termination::newton_failure : Termination::step_underflow;
        return branch;
      }
      const Eigen::VectorXd xp = x1 + ds * t;
      if (!(xp(n) > 0.0)) {
        ds *= settings.shrink;
        continue;
      }
      try {
        const BvpState guess = detail::unpack(xp, sigma, p1.u_star);
        const auto out = detail::bordered_newton(guess, k, row, row.dot(xp), settings.residual_tol,
                                                 settings.corrector_max_iter);
        const Eigen::VectorXd d = detail::pack(out.state) - xp;
        if (std::sqrt(d.dot(w.cwiseProduct(d))) > ds) throw NoConvergence("corrector: jumped off the branch", 0, 0.0);
        branch.points.push_back(make_point(out.state, out.iterations, out.residual));
        structural_failure = false;
        accepted = true;
        if (out.iterations <= settings.fast_iters) ds = std::min(ds * settings.grow, settings.ds_max);
      } catch (const SingularSystem&) {
        structural_failure = true;
        ds *= settings.shrink;
      } catch (const NumericalError&) {
        structural_failure = false;
        ds *= settings.shrink;
      }
    }
    const BranchPoint& last = branch.points.back();
    if (last.omega < settings.omega_min) {
      branch.termination = Termination::homoclinic_suspected;
      return branch;
    }
    if (!inside(last)) {
      branch.termination = Termination::completed;
      return branch;
    }
  }
  branch.termination = Termination::completed;
  return branch;
}

struct Mu2Fit {
  double mu2 = 0.0;
  double omega2 = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of mu - mu_* and omega - omega_* against r^2 over the
/// near-onset part of the branch: points are taken from the start of the
/// branch up to the first point with r > r_hi, keeping those with r >= r_lo.
/// With quartic = true an r^4 column is fitted as well and only the r^2
/// coefficients are returned.
inline Mu2Fit fit_mu2(const Branch& branch, double mu_star, double omega_star, double r_lo, double r_hi,
                      bool quartic = true) {
  std::vector<const BranchPoint*> sel;
  for (const auto& p : branch.points) {
    if (p.r > r_hi) break;
    if (p.r > 0.0 && p.r >= r_lo) sel.push_back(&p);
  }
  if (sel.size() < 5) {
    throw std::invalid_argument("fit_mu2: insufficient points in the amplitude window (" +
                                std::to_string(sel.size()) + " < 5)");
  }
  const int cols = quartic ? 2 : 1;
  Eigen::MatrixXd A(sel.size(), cols);
  Eigen::MatrixXd b(sel.size(), 2);
  for (std::size_t i = 0; i < sel.size(); ++i) {
    const double r2 = sel[i]->r * sel[i]->r;
    A(i, 0) = r2;
    if (quartic) A(i, 1) = r2 * r2;
    b(i, 0) = sel[i]->mu - mu_star;
    b(i, 1) = sel[i]->omega - omega_star;
  }
  const Eigen::MatrixXd x = A.colPivHouseholderQr().solve(b);
  return {x(0, 0), x(0, 1), sel.size()};
}

}  // namespace hopfdbc
