#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hopfdbc/continuation.hpp"
#include "hopfdbc/normalform.hpp"

namespace hopfdbc {

struct BranchFitSettings {
  std::size_t n = 64;
  double r_lo = 0.02;
  double r_hi = 0.1;
  double ds_max = 0.005;
  std::size_t max_points = 400;
};

/// mu2 and omega2 fitted on a continued branch of the cubic example.
inline Mu2Fit fitted_mu2(double alpha, double beta, double gamma, double sigma, const BranchFitSettings& s = {}) {
  const CubicKinetics k(alpha, beta, gamma);
  const ExpansionCoefficients e = expansion(k, sigma);
  const auto seeds = seed_branch(k, e, s.r_lo / 2.0, s.r_lo, s.n);
  ContinuationSettings cs;
  cs.ds0 = std::min(cs.ds0, s.ds_max);
  cs.ds_max = s.ds_max;
  cs.max_points = s.max_points;
  cs.r_window = std::pair{0.0, 1.2 * s.r_hi};
  const Branch b = continue_branch(k, seeds, cs);
  return fit_mu2(b, e.mu_star, e.omega_star, s.r_lo, s.r_hi);
}

struct SweepRow {
  double gamma = 0.0;
  double mu2_closed = std::numeric_limits<double>::quiet_NaN();
  double mu2_fit = std::numeric_limits<double>::quiet_NaN();
  bool agree = false;
  std::string status = "ok";
};

/// Runs fn(i) for i in [0, count) on a pool of worker threads.
template <class F>
void parallel_for(std::size_t count, int threads, F&& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

inline std::vector<double> gamma_grid(double lo, double hi, std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1.0);
  return g;
}

/// Closed-form and branch-fitted mu2 over a gamma grid. Failures are recorded
/// per row and do not stop the sweep.
inline std::vector<SweepRow> sweep_gamma(double alpha, double beta, double sigma, const std::vector<double>& gammas,
                                         const BranchFitSettings& fit, int threads = 0) {
  std::vector<SweepRow> rows(gammas.size());
  parallel_for(gammas.size(), threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.gamma = gammas[i];
    try {
      row.mu2_closed = mu2_omega2(alpha, beta, row.gamma, sigma).mu2;
      row.mu2_fit = fitted_mu2(alpha, beta, row.gamma, sigma, fit).mu2;
      row.agree = std::signbit(row.mu2_closed) == std::signbit(row.mu2_fit);
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
  });
  return rows;
}

struct FlipLocation {
  double lo = 0.0, hi = 0.0;  // bracket with opposite signs of the fitted mu2
  double estimate = 0.0;
};

/// Bisects the sign change of the branch-fitted mu2 inside the first bracket
/// of consecutive successful sweep rows with opposite signs.
inline std::optional<FlipLocation> locate_flip(double alpha, double beta, double sigma, const std::vector<SweepRow>& rows,
                                               const BranchFitSettings& fit, double tol = 1e-4) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto &a = rows[i - 1], &b = rows[i];
    if (a.status != "ok" || b.status != "ok" || std::signbit(a.mu2_fit) == std::signbit(b.mu2_fit)) continue;
    FlipLocation loc{a.gamma, b.gamma, 0.0};
    double lo = a.gamma, hi = b.gamma;
    const bool lo_negative = std::signbit(a.mu2_fit);
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double m = fitted_mu2(alpha, beta, mid, sigma, fit).mu2;
      (std::signbit(m) == lo_negative ? lo : hi) = mid;
    }
    loc.estimate = 0.5 * (lo + hi);
    return loc;
  }
  return std::nullopt;
}

}  // namespace hopfdbc
