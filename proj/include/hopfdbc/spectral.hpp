#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "hopfdbc/errors.hpp"

namespace hopfdbc {

using cplx = std::complex<double>;

/// Fourier coefficients c_l of a 2pi-periodic grid function, stored in FFT
/// order: index k holds wavenumber k for k < n/2, the Nyquist mode at n/2 and
/// wavenumber k - n above. Normalised so that u(s_j) = sum_l c_l exp(i l s_j).
using Spectrum = std::vector<cplx>;

inline constexpr std::size_t default_grid_size = 2048;

inline bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

/// Signed wavenumber of FFT slot k on an n-point grid (Nyquist reported as +n/2).
inline int wavenumber(std::size_t k, std::size_t n) {
  return k <= n / 2 ? static_cast<int>(k) : static_cast<int>(k) - static_cast<int>(n);
}

/// FFT slot of wavenumber l, |l| < n/2 (or l = n/2 for the Nyquist slot).
inline std::size_t mode_index(int l, std::size_t n) {
  const int ni = static_cast<int>(n);
  return static_cast<std::size_t>(((l % ni) + ni) % ni);
}

inline double grid_point(std::size_t j, std::size_t n) {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
}

namespace detail {

inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine = [] {
    Eigen::FFT<double> e;
    e.SetFlag(Eigen::FFT<double>::Unscaled);
    return e;
  }();
  return engine;
}

inline void require_grid(std::size_t n) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("grid size must be a power of two, got " + std::to_string(n));
  }
}

}  // namespace detail

/// Forward transform of complex samples.
inline Spectrum forward_transform(std::span<const cplx> values) {
  const std::size_t n = values.size();
  detail::require_grid(n);
  Spectrum out(n);
  detail::fft_engine().fwd(out.data(), values.data(), static_cast<Eigen::Index>(n));
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& c : out) c *= scale;
  return out;
}

inline Spectrum forward_transform(std::span<const double> values) {
  std::vector<cplx> tmp(values.begin(), values.end());
  return forward_transform(std::span<const cplx>(tmp));
}

/// Inverse transform: grid samples sum_l c_l exp(i l s_j).
inline std::vector<cplx> inverse_transform(std::span<const cplx> coeffs) {
  const std::size_t n = coeffs.size();
  detail::require_grid(n);
  std::vector<cplx> out(n);
  detail::fft_engine().inv(out.data(), coeffs.data(), static_cast<Eigen::Index>(n));
  return out;
}

/// Largest violation of c_{-l} = conj(c_l), including a real Nyquist slot.
inline double hermitian_defect(std::span<const cplx> c) {
  const std::size_t n = c.size();
  double defect = std::max(std::abs(c[0].imag()), std::abs(c[n / 2].imag()));
  for (std::size_t k = 1; k < n / 2; ++k) defect = std::max(defect, std::abs(c[n - k] - std::conj(c[k])));
  return defect;
}

inline std::vector<double> real_inverse_transform(std::span<const cplx> coeffs) {
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
  if (hermitian_defect(coeffs) > 1e-10 * std::max(scale, 1e-300) + 1e-14) {
    throw std::invalid_argument("real_inverse_transform: coefficients are not Hermitian");
  }
  const auto grid = inverse_transform(coeffs);
  std::vector<double> out(grid.size());
  std::transform(grid.begin(), grid.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

/// A real 2pi-periodic boundary trace sampled at s_j = 2 pi j / n, together
/// with its Fourier coefficients.
class PeriodicProfile {
 public:
  PeriodicProfile() = default;

  explicit PeriodicProfile(std::vector<double> values) : values_(std::move(values)) {
    spectrum_ = forward_transform(std::span<const double>(values_));
    symmetrize();
  }

  template <class F>
  static PeriodicProfile sample(std::size_t n, F&& f) {
    detail::require_grid(n);
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = f(grid_point(j, n));
    return PeriodicProfile(std::move(v));
  }

  static PeriodicProfile zero(std::size_t n) { return PeriodicProfile(std::vector<double>(n, 0.0)); }

  /// Builds the real profile with the given coefficients; throws
  /// std::invalid_argument when they are not Hermitian.
  static PeriodicProfile from_spectrum(Spectrum coeffs) {
    PeriodicProfile p;
    p.values_ = real_inverse_transform(coeffs);
    p.spectrum_ = std::move(coeffs);
    p.symmetrize();
    return p;
  }

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  const Spectrum& spectrum() const noexcept { return spectrum_; }
  double operator[](std::size_t j) const { return values_[j]; }

  /// Coefficient of exp(i l s); zero for |l| > n/2.
  cplx coefficient(int l) const {
    const int half = static_cast<int>(size() / 2);
    if (l > half || l < -half) return {0.0, 0.0};
    return spectrum_[mode_index(l, size())];
  }

  /// Profile shifted by k grid cells: result(s) = this(s + 2 pi k / n).
  PeriodicProfile shifted(std::ptrdiff_t k) const {
    const auto n = static_cast<std::ptrdiff_t>(size());
    std::vector<double> v(values_.size());
    for (std::ptrdiff_t j = 0; j < n; ++j) v[j] = values_[((j + k) % n + n) % n];
    return PeriodicProfile(std::move(v));
  }

 private:
  // Enforce exact Hermitian symmetry of the stored coefficients.
  void symmetrize() {
    const std::size_t n = spectrum_.size();
    spectrum_[0] = {spectrum_[0].real(), 0.0};
    spectrum_[n / 2] = {spectrum_[n / 2].real(), 0.0};
    for (std::size_t k = 1; k < n / 2; ++k) {
      const cplx avg = 0.5 * (spectrum_[k] + std::conj(spectrum_[n - k]));
      spectrum_[k] = avg;
      spectrum_[n - k] = std::conj(avg);
    }
  }

  std::vector<double> values_;
  Spectrum spectrum_;
};

/// Multiplies each mode by symbol(l) and clears the Nyquist slot.
template <class Symbol>
Spectrum apply_symbol(std::span<const cplx> coeffs, Symbol&& symbol) {
  const std::size_t n = coeffs.size();
  Spectrum out(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == n / 2) continue;
    out[k] = symbol(wavenumber(k, n)) * coeffs[k];
  }
  return out;
}

/// Symbol sqrt(i omega l + sigma^2) of the Dirichlet-to-Neumann map, sigma on the zero mode.
inline cplx dtn_symbol(double omega, double sigma, int l) {
  if (l == 0) return {sigma, 0.0};
  return std::sqrt(cplx(sigma * sigma, omega * l));
}

/// d/d omega of dtn_symbol.
inline cplx dtn_symbol_domega(double omega, double sigma, int l) {
  if (l == 0) return {0.0, 0.0};
  return cplx(0.0, static_cast<double>(l)) / (2.0 * dtn_symbol(omega, sigma, l));
}

inline Spectrum apply_D(double omega, std::span<const cplx> coeffs) {
  return apply_symbol(coeffs, [omega](int l) { return cplx(0.0, omega * l); });
}

inline Spectrum apply_Dhalf(double omega, double sigma, std::span<const cplx> coeffs) {
  return apply_symbol(coeffs, [=](int l) { return dtn_symbol(omega, sigma, l); });
}

/// Time derivative operator D(omega): multiplier i omega l.
inline PeriodicProfile apply_D(double omega, const PeriodicProfile& p) {
  return PeriodicProfile::from_spectrum(apply_D(omega, std::span<const cplx>(p.spectrum())));
}

/// Dirichlet-to-Neumann operator D(omega, sigma)^{1/2} of the heat equation
/// with degradation sigma^2 on the half-line.
inline PeriodicProfile apply_Dhalf(double omega, double sigma, const PeriodicProfile& p) {
  return PeriodicProfile::from_spectrum(apply_Dhalf(omega, sigma, std::span<const cplx>(p.spectrum())));
}

/// Floquet symbol at sigma = 0, written in rho with lambda = rho^2 so that it
/// is analytic: sqrt(omega (i l + rho^2)) for l != 0 and sqrt(omega) rho for l = 0.
inline cplx floquet_symbol_rho(double omega, cplx rho, int l) {
  if (l == 0) return std::sqrt(omega) * rho;
  return std::sqrt(omega * (cplx(0.0, static_cast<double>(l)) + rho * rho));
}

inline cplx floquet_symbol_rho_drho(double omega, cplx rho, int l) {
  if (l == 0) return {std::sqrt(omega), 0.0};
  return omega * rho / floquet_symbol_rho(omega, rho, l);
}

/// Floquet Dirichlet-to-Neumann symbol in lambda with principal roots.
inline cplx floquet_symbol(double omega, cplx lambda, int l) {
  const cplx z = cplx(0.0, static_cast<double>(l)) + lambda;
  if (z.imag() == 0.0 && z.real() < 0.0) {
    throw BranchCutError("Floquet symbol evaluated on the branch cut at mode " + std::to_string(l));
  }
  if (l == 0) return std::sqrt(omega) * std::sqrt(lambda);
  return std::sqrt(omega * z);
}

/// Applies the Floquet symbol to complex grid data; Nyquist cleared.
inline std::vector<cplx> apply_Dhalf_floquet(double omega, cplx lambda, std::span<const cplx> values) {
  const Spectrum c = forward_transform(values);
  const Spectrum out = apply_symbol(c, [=](int l) { return floquet_symbol(omega, lambda, l); });
  return inverse_transform(out);
}

/// Coefficients on a finer grid of size m >= n; the Nyquist slot is dropped.
inline Spectrum pad_spectrum(std::span<const cplx> coeffs, std::size_t m) {
  const std::size_t n = coeffs.size();
  Spectrum out(m, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    if (k == n / 2) continue;
    out[mode_index(wavenumber(k, n), m)] = coeffs[k];
  }
  return out;
}

/// Keeps the modes |l| < n/2 of a spectrum from a finer grid; Nyquist zero.
inline Spectrum truncate_spectrum(std::span<const cplx> coeffs, std::size_t n) {
  const std::size_t m = coeffs.size();
  Spectrum out(n, cplx(0.0, 0.0));
  for (int l = -static_cast<int>(n / 2) + 1; l < static_cast<int>(n / 2); ++l) out[mode_index(l, n)] = coeffs[mode_index(l, m)];
  return out;
}

/// Real samples of a band-limited function on the 2x zero-padded grid.
inline std::vector<double> padded_samples(std::span<const cplx> coeffs) {
  const Spectrum padded = pad_spectrum(coeffs, 2 * coeffs.size());
  const auto grid = inverse_transform(padded);
  std::vector<double> out(grid.size());
  std::transform(grid.begin(), grid.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

/// Coefficients |l| < n/2 of real samples taken on the 2x padded grid.
inline Spectrum from_padded_samples(std::span<const double> samples, std::size_t n) {
  return truncate_spectrum(forward_transform(samples), n);
}

/// r = 2 |c_1|: amplitude of the first harmonic.
inline double amplitude(const PeriodicProfile& p) { return 2.0 * std::abs(p.coefficient(1)); }

}  // namespace hopfdbc
