#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopfdbc/errors.hpp"
#include "hopfdbc/kinetics.hpp"
#include "hopfdbc/spectral.hpp"

namespace hopfdbc {

/// Bulk field of a periodic orbit on a (phase, depth) grid.
struct FieldSlice {
  std::vector<double> s_grid;
  std::vector<double> x_grid;
  std::vector<std::vector<double>> values;  // values[i][j] = u(s_j, x_i)
  double sigma = 0.0;
  double u_inf = 0.0;
  double eta = std::numeric_limits<double>::quiet_NaN();  // filled by fit_far_field
};

/// Bulk field of the boundary trace p (absolute values, not centered):
/// u(s, x) = sum_{l != 0} c_l exp(-sqrt(i omega l + sigma^2) x) exp(i l s) + c_0 exp(-sigma x).
inline FieldSlice reconstruct(const PeriodicProfile& p, double omega, double sigma, const std::vector<double>& x_grid) {
  if (!(omega > 0.0)) throw std::invalid_argument("reconstruct: omega must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("reconstruct: sigma must be nonnegative");
  const std::size_t n = p.size();
  FieldSlice out;
  out.sigma = sigma;
  out.x_grid = x_grid;
  out.s_grid.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.s_grid[j] = grid_point(j, n);
  out.u_inf = p.coefficient(0).real();
  const Spectrum& c = p.spectrum();
  out.values.reserve(x_grid.size());
  for (double x : x_grid) {
    const Spectrum cx = apply_symbol(c, [&](int l) {
      return l == 0 ? cplx(std::exp(-sigma * x), 0.0) : std::exp(-dtn_symbol(omega, sigma, l) * x);
    });
    const auto grid = inverse_transform(cx);
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = grid[j].real();
    out.values.push_back(std::move(row));
  }
  return out;
}

struct FarField {
  double u_inf = 0.0;
  double C = 0.0;
  double eta = 0.0;  // +inf when the transient part vanishes
};

/// Fits sup_s |u(s, x) - u_inf exp(-sigma x)| ~ C exp(-eta x) on the tail half
/// of the depth grid by linear least squares in log scale. C is then raised so
/// the bound holds on every tail point.
inline FarField fit_far_field(const FieldSlice& slice) {
  const std::size_t m = slice.x_grid.size();
  if (m < 4) throw std::invalid_argument("fit_far_field: need at least four depths");
  FarField ff;
  ff.u_inf = slice.u_inf;
  double scale = std::abs(slice.u_inf);
  for (const auto& row : slice.values) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  const double floor = 1e-13 * std::max(scale, 1e-300);
  std::vector<double> xs, logs, res_tail;
  for (std::size_t i = m / 2; i < m; ++i) {
    const double x = slice.x_grid[i];
    const double tail = slice.u_inf * std::exp(-slice.sigma * x);
    double sup = 0.0;
    for (double v : slice.values[i]) sup = std::max(sup, std::abs(v - tail));
    res_tail.push_back(sup);
    if (sup > floor) {
      xs.push_back(x);
      logs.push_back(std::log(sup));
    }
  }
  if (xs.size() < 2) {
    ff.eta = std::numeric_limits<double>::infinity();
    ff.C = 0.0;
    return ff;
  }
  const double xm = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double lm = std::accumulate(logs.begin(), logs.end(), 0.0) / logs.size();
  double sxx = 0.0, sxl = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xm) * (xs[i] - xm);
    sxl += (xs[i] - xm) * (logs[i] - lm);
  }
  const double slope = sxl / sxx;
  if (!(slope < 0.0)) {
    throw NumericalError("fit_far_field: residual does not decay (fitted eta = " + std::to_string(-slope) + ")");
  }
  ff.eta = -slope;
  for (std::size_t i = m / 2, k = 0; i < m; ++i, ++k) {
    ff.C = std::max(ff.C, res_tail[k] * std::exp(ff.eta * slice.x_grid[i]));
  }
  return ff;
}

enum class FarBoundary { dirichlet_zero, neumann_zero };

struct SimSettings {
  double L = 60.0;
  double dx = 0.05;
  double dt = 0.01;
  double T = 200.0;
  FarBoundary far_bc = FarBoundary::dirichlet_zero;
  double cap = 1e6;          // |u^-| above this is reported as divergence
  int record_every = 1;      // steps between trajectory samples
  double snapshot_every = 0.0;  // time between bulk snapshots, 0 for none

  void validate() const {
    if (!(L > 0.0) || !(dx > 0.0) || !(dt > 0.0) || !(T >= 0.0)) {
      throw std::invalid_argument("SimSettings: need L, dx, dt > 0 and T >= 0");
    }
    if (L / dx < 4.0) throw std::invalid_argument("SimSettings: fewer than four grid cells");
    if (record_every < 1) throw std::invalid_argument("SimSettings: record_every must be at least 1");
    if (!(cap > 0.0)) throw std::invalid_argument("SimSettings: cap must be positive");
  }
};

struct SimInit {
  double u_minus = 0.0;
  std::function<double(double)> bulk;  // u(0, x); defaults to u_minus exp(-x)
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;  // on Trajectory::x
};

struct Trajectory {
  std::vector<double> t;
  std::vector<double> u_minus;
  std::vector<double> flux;  // outer normal derivative -u_x(t, 0)
  std::vector<double> x;
  std::vector<Snapshot> snapshots;
};

namespace detail {

/// Solves a tridiagonal system in place (Thomas algorithm); lower[0] and
/// upper[n-1] are unused.
inline void thomas(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                   std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

/// Crank-Nicolson step of u_t = u_xx - sigma^2 u on nodes 0..M with u_0 given
/// at the old and new time levels.
class BulkStepper {
 public:
  BulkStepper(std::size_t M, double dx, double dt, double sigma, FarBoundary bc)
      : M_(M), bc_(bc), k_(dt / (dx * dx)), s2_(sigma * sigma * dt) {}

  std::vector<double> step(const std::vector<double>& u, double left_new) const {
    // Unknowns: nodes 1..M-1 (Dirichlet) or 1..M (Neumann, ghost node mirrored).
    const std::size_t m = bc_ == FarBoundary::dirichlet_zero ? M_ - 1 : M_;
    std::vector<double> lo(m, -0.5 * k_), di(m, 1.0 + k_ + 0.5 * s2_), up(m, -0.5 * k_), rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + 1;
      const double left = u[j - 1];
      const double right = j + 1 <= M_ ? u[j + 1] : u[j - 1];
      rhs[i] = u[j] + 0.5 * k_ * (left - 2.0 * u[j] + right) - 0.5 * s2_ * u[j];
    }
    rhs[0] += 0.5 * k_ * left_new;
    if (bc_ == FarBoundary::neumann_zero) lo[m - 1] = -k_;
    thomas(std::move(lo), std::move(di), std::move(up), rhs);
    std::vector<double> out(M_ + 1, 0.0);
    out[0] = left_new;
    for (std::size_t i = 0; i < m; ++i) out[i + 1] = rhs[i];
    return out;
  }

 private:
  std::size_t M_;
  FarBoundary bc_;
  double k_, s2_;
};

inline double outer_flux(const std::vector<double>& u, double dx) {
  return (3.0 * u[0] - 4.0 * u[1] + u[2]) / (2.0 * dx);
}

}  // namespace detail

/// Time-domain simulation of the bulk equation on [0, L] coupled to the
/// dynamic boundary condition d u^-/dt = f(u^-, -u_x(t, 0), mu).
///
/// Bulk: Crank-Nicolson. Boundary: Heun's method, with the bulk advanced to
/// the predicted boundary value between the two stages and then again to the
/// corrected one.
template <BoundaryKinetics K>
Trajectory simulate(const K& k, double mu, double sigma, const SimSettings& settings, const SimInit& init) {
  settings.validate();
  if (!(sigma >= 0.0)) throw std::invalid_argument("simulate: sigma must be nonnegative");
  const auto M = static_cast<std::size_t>(std::llround(settings.L / settings.dx));
  const double dx = settings.L / static_cast<double>(M);
  const double dt = settings.dt;
  const auto steps = static_cast<std::size_t>(std::llround(settings.T / dt));

  Trajectory traj;
  traj.x.resize(M + 1);
  std::vector<double> u(M + 1);
  for (std::size_t j = 0; j <= M; ++j) {
    traj.x[j] = j * dx;
    u[j] = j == 0 ? init.u_minus : (init.bulk ? init.bulk(traj.x[j]) : init.u_minus * std::exp(-traj.x[j]));
  }
  if (settings.far_bc == FarBoundary::dirichlet_zero) u[M] = 0.0;

  const detail::BulkStepper bulk(M, dx, dt, sigma, settings.far_bc);
  double next_snapshot = 0.0;
  auto record = [&](double t) {
    traj.t.push_back(t);
    traj.u_minus.push_back(u[0]);
    traj.flux.push_back(detail::outer_flux(u, dx));
  };
  auto snapshot = [&](double t) {
    if (settings.snapshot_every > 0.0 && t >= next_snapshot - 1e-12) {
      traj.snapshots.push_back({t, u});
      next_snapshot += settings.snapshot_every;
    }
  };
  record(0.0);
  snapshot(0.0);
  for (std::size_t n = 1; n <= steps; ++n) {
    const double k1 = k.value(u[0], detail::outer_flux(u, dx), mu);
    const double u_pred = u[0] + dt * k1;
    const std::vector<double> trial = bulk.step(u, u_pred);
    const double k2 = k.value(u_pred, detail::outer_flux(trial, dx), mu);
    const double u_new = u[0] + 0.5 * dt * (k1 + k2);
    if (!std::isfinite(u_new) || std::abs(u_new) > settings.cap) {
      throw Divergence("simulate: boundary value exceeded " + std::to_string(settings.cap) + " at t = " +
                       std::to_string(n * dt));
    }
    u = bulk.step(u, u_new);
    const double t = n * dt;
    if (n % static_cast<std::size_t>(settings.record_every) == 0) record(t);
    snapshot(t);
  }
  return traj;
}

struct PeriodEstimate {
  double omega = 0.0;
  double r = 0.0;
};

/// Frequency from upward zero crossings of u^- minus its mean over the last
/// part of the run; amplitude 2 |c_1| of the last full period resampled on
/// 256 points.
inline PeriodEstimate extract_period(const std::vector<double>& t, const std::vector<double>& u,
                                     double tail_fraction = 0.5) {
  if (t.size() != u.size() || t.size() < 4) throw std::invalid_argument("extract_period: need matching samples");
  const std::size_t start = static_cast<std::size_t>((1.0 - tail_fraction) * static_cast<double>(t.size()));
  const double mean = std::accumulate(u.begin() + start, u.end(), 0.0) / static_cast<double>(u.size() - start);
  const auto [lo, hi] = std::minmax_element(u.begin() + start, u.end());
  if (!(*hi - *lo > 1e-8)) throw SteadyState("extract_period: no oscillation in the tail of the run");
  std::vector<double> ups;
  for (std::size_t i = start + 1; i < u.size(); ++i) {
    const double a = u[i - 1] - mean, b = u[i] - mean;
    if (a < 0.0 && b >= 0.0) ups.push_back(t[i - 1] + (t[i] - t[i - 1]) * (-a) / (b - a));
  }
  if (ups.size() < 2) throw SteadyState("extract_period: fewer than two upward zero crossings");
  const double period = (ups.back() - ups.front()) / static_cast<double>(ups.size() - 1);
  PeriodEstimate est;
  est.omega = 2.0 * std::numbers::pi / period;

  const double t0 = ups[ups.size() - 2], t1 = ups.back();
  constexpr std::size_t n = 256;
  std::vector<double> samples(n);
  std::size_t i = start;
  for (std::size_t j = 0; j < n; ++j) {
    const double tj = t0 + (t1 - t0) * static_cast<double>(j) / n;
    while (i + 1 < t.size() && t[i + 1] < tj) ++i;
    const double w = (tj - t[i]) / (t[i + 1] - t[i]);
    samples[j] = (1.0 - w) * u[i] + w * u[i + 1];
  }
  est.r = amplitude(PeriodicProfile(std::move(samples)));
  return est;
}

inline PeriodEstimate extract_period(const Trajectory& traj, double tail_fraction = 0.5) {
  return extract_period(traj.t, traj.u_minus, tail_fraction);
}

}  // namespace hopfdbc
