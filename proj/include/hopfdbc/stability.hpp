#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "hopfdbc/continuation.hpp"
#include "hopfdbc/errors.hpp"
#include "hopfdbc/kinetics.hpp"
#include "hopfdbc/normalform.hpp"
#include "hopfdbc/spectral.hpp"

namespace hopfdbc {

/// Coefficients of the reduced 2x2 Floquet problem of the cubic example
/// without degradation, at orders r^2, lambda and sqrt(lambda) r^2.
struct ReducedCoeffs {
  cplx a, b, c, d;
};

inline ReducedCoeffs reduced_coeffs(double alpha, double beta, double gamma) {
  if (!(alpha > 0.0)) throw std::invalid_argument("reduced_coeffs: alpha must be positive");
  const double s2 = std::numbers::sqrt2;
  const cplx i(0.0, 1.0);
  const cplx num = 3.0 * ((1.0 + 2.0 * i) - (1.0 + i) * s2) * alpha * gamma +
                   ((6.0 + 8.0 * i) - (4.0 + 4.0 * i) * s2) * beta * beta;
  const cplx den = ((4.0 + 8.0 * i) - (4.0 + 4.0 * i) * s2) * alpha;
  ReducedCoeffs rc;
  rc.a = -num / den;
  rc.c = rc.a;
  rc.b = (1.0 + i) * alpha / 2.0;
  rc.d = ((-2.0 - 2.0 * i) + (1.0 + 2.0 * i) * s2) * beta * beta / (((-1.0 - 2.0 * i) + (1.0 + i) * s2) * alpha);
  return rc;
}

/// Coefficient of r^2 in the nonzero small Floquet exponent: -2 Re(a conj b) / |b|^2.
inline double leading_eigenvalue(const ReducedCoeffs& rc) {
  return -2.0 * (rc.a * std::conj(rc.b)).real() / std::norm(rc.b);
}

enum class FloquetMethod { closed_form, numeric };

inline const char* to_string(FloquetMethod m) { return m == FloquetMethod::closed_form ? "closed_form" : "numeric"; }

struct FloquetResult {
  std::vector<cplx> exponents;  // lambda, translation root included
  FloquetMethod method = FloquetMethod::numeric;
  int truncation = 0;           // modes |l| <= truncation
  double translation_error = std::numeric_limits<double>::infinity();  // min |lambda| over the roots
};

struct FloquetWindow {
  double re_half = 0.0;  // |Re lambda| <= re_half
  double im_half = 0.2;  // |Im lambda| <= im_half
  int grid = 41;         // grid x grid scan points
};

struct FloquetSettings {
  int truncation = 64;
  bool check_doubling = true;    // refine again with 2 * truncation
  double doubling_tol = 1e-6;    // allowed relative change
  double root_tol = 1e-13;       // step size in rho that ends the refinement
  int max_iter = 60;
  double dedupe_tol = 1e-7;
};

/// Truncated Floquet operator of a periodic orbit at sigma = 0 as a function of
/// rho, lambda = rho^2, on the modes -N..N:
///   T_lm = delta_lm omega (i l + rho^2) - A_{l-m} - B_{l-m} S_m(rho)
/// with A, B the Fourier coefficients of d_u f and d_flux f along the orbit
/// and S_m the Dirichlet-to-Neumann symbol in rho.
class FloquetOperator {
 public:
  template <BoundaryKinetics K>
  FloquetOperator(const BranchPoint& p, const K& k) : omega_(p.omega) {
    if (p.sigma != 0.0) throw std::invalid_argument("FloquetOperator: only available without degradation");
    const Spectrum& c = p.profile.spectrum();
    const std::size_t n = c.size();
    const Spectrum flux = apply_Dhalf(p.omega, 0.0, std::span<const cplx>(c));
    const auto v_pad = padded_samples(c);
    const auto g_pad = padded_samples(flux);
    std::vector<double> du(v_pad.size()), dg(v_pad.size());
    for (std::size_t j = 0; j < v_pad.size(); ++j) {
      const Partials q = k.partials(p.u_star + v_pad[j], g_pad[j], p.mu);
      du[j] = q.d_u;
      dg[j] = q.d_flux;
    }
    a_hat_ = forward_transform(std::span<const double>(du));
    b_hat_ = forward_transform(std::span<const double>(dg));
    half_ = static_cast<int>(n) - 1;  // modes |k| < n survive the padded product
  }

  /// Coefficient of exp(i k s) of d_u f, zero outside the resolved band.
  cplx a_coefficient(int k) const { return coefficient(a_hat_, k); }
  cplx b_coefficient(int k) const { return coefficient(b_hat_, k); }

  Eigen::MatrixXcd matrix(cplx rho, int N) const {
    const int size = 2 * N + 1;
    Eigen::MatrixXcd T(size, size);
    std::vector<cplx> symbol(size);
    for (int m = -N; m <= N; ++m) symbol[m + N] = floquet_symbol_rho(omega_, rho, m);
    for (int l = -N; l <= N; ++l) {
      for (int m = -N; m <= N; ++m) {
        T(l + N, m + N) = -a_coefficient(l - m) - b_coefficient(l - m) * symbol[m + N];
      }
      T(l + N, l + N) += omega_ * (cplx(0.0, static_cast<double>(l)) + rho * rho);
    }
    return T;
  }

  double omega() const noexcept { return omega_; }

 private:
  cplx coefficient(const Spectrum& s, int k) const {
    if (k > half_ || k < -half_) return {0.0, 0.0};
    return s[mode_index(k, s.size())];
  }

  double omega_;
  Spectrum a_hat_, b_hat_;
  int half_ = 0;
};

namespace detail {

inline double smallest_singular_value(const Eigen::MatrixXcd& T) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(T);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

inline cplx rho_of(cplx lambda) {
  cplx rho = std::sqrt(lambda);
  if (rho.real() < 0.0) rho = -rho;
  return rho;
}

/// Variable of the secant iteration. The translation root lambda = 0 is a
/// double root in rho, so it is refined in lambda instead.
enum class RootVariable { rho, lambda };

/// Secant iteration on the bordered scalar y defined by
/// [T b; c^H 0] [x; y] = [0; 1], which vanishes exactly when T is singular.
/// The start and the iterates are in the chosen variable; the result is rho.
inline std::optional<cplx> refine_root(const FloquetOperator& op, cplx start, int N, const FloquetSettings& s,
                                       RootVariable var = RootVariable::rho) {
  const int size = 2 * N + 1;
  auto to_rho = [var](cplx z) { return var == RootVariable::rho ? z : rho_of(z); };
  Eigen::MatrixXcd T0 = op.matrix(to_rho(start), N);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(T0, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXcd b = svd.matrixU().col(size - 1);
  const Eigen::VectorXcd c = svd.matrixV().col(size - 1);
  auto y_of = [&](cplx z) {
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(size + 1, size + 1);
    B.topLeftCorner(size, size) = op.matrix(to_rho(z), N);
    B.block(0, size, size, 1) = b;
    B.block(size, 0, 1, size) = c.adjoint();
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(size + 1);
    rhs(size) = 1.0;
    return Eigen::VectorXcd(B.partialPivLu().solve(rhs))(size);
  };
  const double h = var == RootVariable::rho ? std::max(1e-6, 1e-3 * std::abs(start)) : std::max(1e-12, 1e-3 * std::abs(start));
  cplx r_prev = start, r_cur = start + h;
  cplx y_prev = y_of(r_prev), y_cur = y_of(r_cur);
  for (int it = 0; it < s.max_iter; ++it) {
    if (y_cur == y_prev) return std::abs(y_cur) < 1e-14 ? std::optional<cplx>(to_rho(r_cur)) : std::nullopt;
    const cplx step = y_cur * (r_cur - r_prev) / (y_cur - y_prev);
    r_prev = r_cur;
    y_prev = y_cur;
    r_cur -= step;
    if (!std::isfinite(r_cur.real()) || !std::isfinite(r_cur.imag())) return std::nullopt;
    if (std::abs(step) <= s.root_tol * std::max(1.0, std::abs(r_cur))) return to_rho(r_cur);
    y_cur = y_of(r_cur);
    if (y_cur == cplx(0.0, 0.0)) return to_rho(r_cur);
  }
  return std::nullopt;
}

inline void push_unique(std::vector<cplx>& roots, cplx lambda, double tol) {
  for (const auto& r : roots) {
    if (std::abs(r - lambda) <= tol * std::max(1.0, std::abs(lambda))) return;
  }
  roots.push_back(lambda);
}

}  // namespace detail

/// Floquet exponents of a converged orbit (sigma = 0) in a window around 0.
///
/// Smallest singular values of the truncated operator are scanned on a grid
/// in lambda; interior local minima are refined in rho. The root lambda = 0
/// of the translation mode is always refined, in lambda, from 1e-6. With
/// check_doubling the roots are refined again at twice the truncation and
/// UnresolvedTruncation is thrown if any moves by more than doubling_tol.
template <BoundaryKinetics K>
FloquetResult floquet_numeric(const BranchPoint& point, const K& k, const FloquetWindow& window,
                              const FloquetSettings& settings = {}) {
  if (!(window.re_half > 0.0) || !(window.im_half > 0.0) || window.grid < 3) {
    throw std::invalid_argument("floquet_numeric: window must have positive extent and at least 3 grid points");
  }
  if (settings.truncation < 1) throw std::invalid_argument("floquet_numeric: truncation must be positive");
  const FloquetOperator op(point, k);
  const int N = settings.truncation;
  const int g = window.grid;
  std::vector<double> smin(static_cast<std::size_t>(g * g));
  auto lambda_at = [&](int i, int j) {
    return cplx(-window.re_half + 2.0 * window.re_half * i / (g - 1), -window.im_half + 2.0 * window.im_half * j / (g - 1));
  };
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      smin[i * g + j] = detail::smallest_singular_value(op.matrix(detail::rho_of(lambda_at(i, j)), N));
    }
  }

  using detail::RootVariable;
  std::vector<std::pair<cplx, RootVariable>> starts{{cplx(1e-6, 0.0), RootVariable::lambda}};
  for (int i = 1; i < g - 1; ++i) {
    for (int j = 1; j < g - 1; ++j) {
      const double v = smin[i * g + j];
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if ((di || dj) && smin[(i + di) * g + (j + dj)] < v) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) starts.emplace_back(detail::rho_of(lambda_at(i, j)), RootVariable::rho);
    }
  }

  std::vector<std::pair<cplx, RootVariable>> rhos;
  for (const auto& [z0, var] : starts) {
    const auto rho = detail::refine_root(op, z0, N, settings, var);
    if (!rho) continue;
    const cplx lambda = (*rho) * (*rho);
    if (std::abs(lambda.real()) > window.re_half || std::abs(lambda.imag()) > window.im_half) continue;
    std::vector<cplx> tmp;
    for (const auto& r : rhos) tmp.push_back(r.first * r.first);
    const std::size_t before = tmp.size();
    detail::push_unique(tmp, lambda, settings.dedupe_tol);
    if (tmp.size() > before) rhos.emplace_back(*rho, var);
  }

  FloquetResult out;
  out.method = FloquetMethod::numeric;
  out.truncation = N;
  for (const auto& [r, var] : rhos) {
    cplx lambda = r * r;
    if (settings.check_doubling) {
      const auto r2 = detail::refine_root(op, var == RootVariable::rho ? r : r * r, 2 * N, settings, var);
      const cplx lambda2 = r2 ? (*r2) * (*r2) : cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
      if (!r2 || !(std::abs(lambda2 - lambda) <= settings.doubling_tol * std::abs(lambda) + 1e-12)) {
        throw UnresolvedTruncation("floquet_numeric: exponent " + std::to_string(lambda.real()) + "+" +
                                   std::to_string(lambda.imag()) + "i moves when the truncation doubles");
      }
      lambda = lambda2;
    }
    out.exponents.push_back(lambda);
    out.translation_error = std::min(out.translation_error, std::abs(lambda));
  }
  if (settings.check_doubling) out.truncation = 2 * N;
  std::sort(out.exponents.begin(), out.exponents.end(),
            [](cplx x, cplx y) { return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag(); });
  return out;
}

/// Scan window for the cubic example: four times the closed-form exponent.
inline FloquetWindow closed_form_window(const ExpansionCoefficients& e, double r) {
  const double l1 = std::abs(leading_eigenvalue(reduced_coeffs(e.alpha, e.beta, e.gamma))) * r * r;
  FloquetWindow w;
  w.re_half = 4.0 * std::max(l1, 1e-12);
  return w;
}

/// Largest real part among exponents with |lambda| above the resolution.
inline std::optional<cplx> leading_nonzero(const FloquetResult& f, double resolution = 1e-8) {
  std::optional<cplx> best;
  for (const auto& l : f.exponents) {
    if (std::abs(l) <= resolution) continue;
    if (!best || l.real() > best->real()) best = l;
  }
  return best;
}

inline Stability classify(const FloquetResult& f, double resolution = 1e-8) {
  const auto l = leading_nonzero(f, resolution);
  if (!l || std::abs(l->real()) <= resolution) return Stability::unknown;
  return l->real() > 0.0 ? Stability::unstable : Stability::stable;
}

/// Near-onset classification of a branch point of the cubic example. Without
/// degradation this uses the reduced exponent lambda1 r^2; with degradation
/// the sign of mu2 decides. Points with r < min_r are reported unknown.
inline Stability classify(const BranchPoint& p, const ExpansionCoefficients& e, double min_r = 1e-6,
                          double* lambda1_out = nullptr) {
  if (p.r < min_r) return Stability::unknown;
  if (e.sigma == 0.0) {
    const double l1 = leading_eigenvalue(reduced_coeffs(e.alpha, e.beta, e.gamma));
    if (lambda1_out) *lambda1_out = l1 * p.r * p.r;
    if (std::abs(l1) < 1e-12) return Stability::unknown;
    return l1 > 0.0 ? Stability::unstable : Stability::stable;
  }
  if (std::abs(e.mu2) < 1e-12) return Stability::unknown;
  return e.mu2 > 0.0 ? Stability::stable : Stability::unstable;
}

}  // namespace hopfdbc
