#pragma once

// Spherical Bessel j_n, y_n and Hankel h_n^(1) of complex argument, the
// Riccati-Bessel derivatives d/dz[z f_n(z)], and ln(m!!).
//
// j_n: upward recurrence from the closed forms when n <= |z|; otherwise
// backward (Miller) recurrence on the ratios j_k/j_{k-1}, normalized by
// whichever of j_0, j_1 is larger. y_n: always upward (it is the dominant
// solution). Table functions return orders 0..nmax in one pass.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <string>
#include <vector>

#include "lhsphere/errors.hpp"

namespace lhsphere::specfun {

enum class RiccatiKind { J, H1 };

namespace detail {

template <std::floating_point Real>
bool finite(std::complex<Real> v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

template <std::floating_point Real>
std::complex<double> narrow(std::complex<Real> z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

template <std::floating_point Real>
bool underflowed(std::complex<Real> v) {
  return std::abs(v) < std::numeric_limits<Real>::min();
}

template <std::floating_point Real>
std::complex<Real> j0_closed(std::complex<Real> z) {
  return std::sin(z) / z;
}

template <std::floating_point Real>
std::complex<Real> j1_closed(std::complex<Real> z) {
  return std::sin(z) / (z * z) - std::cos(z) / z;
}

// ratios[k] = j_k / j_{k-1} for k = 1..nmax, from a backward sweep started
// at order `top` with j_{top+1}/j_top = 0.
template <std::floating_point Real>
void backward_ratios(int nmax, int top, std::complex<Real> z,
                     std::vector<std::complex<Real>>& ratios) {
  ratios.assign(static_cast<std::size_t>(nmax) + 1, {});
  const std::complex<Real> inv_z = Real(1) / z;
  const Real tiny = std::numeric_limits<Real>::min() * Real(1e10);
  std::complex<Real> next{0, 0};
  for (int k = top; k >= 1; --k) {
    std::complex<Real> d = Real(2 * k + 1) * inv_z - next;
    if (d == std::complex<Real>{0, 0}) d = tiny;
    next = Real(1) / d;
    if (k <= nmax) ratios[static_cast<std::size_t>(k)] = next;
  }
}

template <std::floating_point Real>
void check_finite(const std::vector<std::complex<Real>>& values, std::complex<Real> z,
                  const char* name) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!finite(values[k])) {
      throw SaturationError(std::string(name) + ": value left the floating range at order " +
                                std::to_string(k),
                            static_cast<int>(k), narrow(z));
    }
  }
}

}  // namespace detail

/// j_0(z) .. j_nmax(z). Throws AccuracyLossError when a requested order
/// underflows (z != 0) and SaturationError when |Im z| is too large.
template <std::floating_point Real>
std::vector<std::complex<Real>> sph_bessel_j_table(int nmax, std::complex<Real> z) {
  if (nmax < 0) throw DomainError("sph_bessel_j: negative order");
  std::vector<std::complex<Real>> j(static_cast<std::size_t>(nmax) + 1);
  if (z == std::complex<Real>{0, 0}) {
    j[0] = 1;
    return j;
  }
  const Real az = std::abs(z);
  const std::complex<Real> j0 = detail::j0_closed(z);
  if (nmax == 0) {
    j[0] = j0;
    detail::check_finite(j, z, "sph_bessel_j");
    return j;
  }

  if (Real(2) * static_cast<Real>(nmax) <= az) {
    j[0] = j0;
    j[1] = detail::j1_closed(z);
    for (int k = 1; k < nmax; ++k) {
      j[static_cast<std::size_t>(k) + 1] =
          Real(2 * k + 1) / z * j[static_cast<std::size_t>(k)] - j[static_cast<std::size_t>(k) - 1];
    }
  } else {
    // Miller start: n + max(15, ceil|z|), margin doubled until the top ratio
    // is stable to 1e-12.
    int margin = std::max(15, static_cast<int>(std::ceil(az)));
    std::vector<std::complex<Real>> ratios;
    std::vector<std::complex<Real>> wider;
    detail::backward_ratios(nmax, nmax + margin, z, ratios);
    for (;;) {
      margin *= 2;
      detail::backward_ratios(nmax, nmax + margin, z, wider);
      const auto top = static_cast<std::size_t>(nmax);
      const bool stable = std::abs(wider[top] - ratios[top]) <= Real(1e-12) * std::abs(wider[top]);
      ratios.swap(wider);
      if (stable) break;
      if (margin > (1 << 24)) {
        throw AccuracyLossError("sph_bessel_j: backward recurrence did not stabilize", nmax,
                                detail::narrow(z));
      }
    }
    const std::complex<Real> j1 = detail::j1_closed(z);
    if (std::abs(j0) >= std::abs(j1)) {
      j[0] = j0;
      j[1] = j0 * ratios[1];
    } else {
      j[1] = j1;
      j[0] = j1 / ratios[1];
    }
    for (int k = 2; k <= nmax; ++k) {
      j[static_cast<std::size_t>(k)] = j[static_cast<std::size_t>(k) - 1] * ratios[static_cast<std::size_t>(k)];
    }
  }

  detail::check_finite(j, z, "sph_bessel_j");
  for (int k = 0; k <= nmax; ++k) {
    if (detail::underflowed(j[static_cast<std::size_t>(k)])) {
      throw AccuracyLossError("sph_bessel_j: normalization chain underflowed at order " +
                                  std::to_string(k),
                              k, detail::narrow(z));
    }
  }
  return j;
}

/// y_0(z) .. y_nmax(z) by upward recurrence. z = 0 is a pole.
template <std::floating_point Real>
std::vector<std::complex<Real>> sph_bessel_y_table(int nmax, std::complex<Real> z) {
  if (nmax < 0) throw DomainError("sph_bessel_y: negative order");
  if (z == std::complex<Real>{0, 0}) throw DomainError("sph_bessel_y: pole at z = 0");
  std::vector<std::complex<Real>> y(static_cast<std::size_t>(nmax) + 1);
  const std::complex<Real> c = std::cos(z);
  y[0] = -c / z;
  if (nmax >= 1) y[1] = -c / (z * z) - std::sin(z) / z;
  for (int k = 1; k < nmax; ++k) {
    y[static_cast<std::size_t>(k) + 1] =
        Real(2 * k + 1) / z * y[static_cast<std::size_t>(k)] - y[static_cast<std::size_t>(k) - 1];
  }
  detail::check_finite(y, z, "sph_bessel_y");
  return y;
}

/// h_n = j_n + i y_n. Near the real axis it is formed from j and y so that
/// Re h_n = j_n exactly for real z (Mie denominators at resonance rely on
/// it). Above Im z = 1 that sum cancels by e^{2 Im z}, so h is recurred
/// upward from the closed forms of h_0 and h_1 instead.
template <std::floating_point Real>
std::vector<std::complex<Real>> sph_hankel1_table(int nmax, std::complex<Real> z) {
  if (nmax < 0) throw DomainError("sph_hankel1: negative order");
  if (z == std::complex<Real>{0, 0}) throw DomainError("sph_hankel1: pole at z = 0");
  if (z.imag() <= Real(1)) {
    auto h = sph_bessel_j_table(nmax, z);
    const auto y = sph_bessel_y_table(nmax, z);
    for (std::size_t k = 0; k < h.size(); ++k) h[k] += std::complex<Real>{0, 1} * y[k];
    return h;
  }
  std::vector<std::complex<Real>> h(static_cast<std::size_t>(nmax) + 1);
  const std::complex<Real> i{0, 1};
  const std::complex<Real> e = std::exp(i * z);
  h[0] = -i * e / z;
  if (nmax >= 1) h[1] = -e * (z + i) / (z * z);
  for (int k = 1; k < nmax; ++k) {
    h[static_cast<std::size_t>(k) + 1] =
        Real(2 * k + 1) / z * h[static_cast<std::size_t>(k)] - h[static_cast<std::size_t>(k) - 1];
  }
  detail::check_finite(h, z, "sph_hankel1");
  return h;
}

template <std::floating_point Real>
std::complex<Real> sph_bessel_j(int n, std::complex<Real> z) {
  return sph_bessel_j_table(n, z).back();
}

template <std::floating_point Real>
std::complex<Real> sph_bessel_y(int n, std::complex<Real> z) {
  return sph_bessel_y_table(n, z).back();
}

template <std::floating_point Real>
std::complex<Real> sph_hankel1(int n, std::complex<Real> z) {
  return sph_hankel1_table(n, z).back();
}

/// d/dz[z f_k(z)] for k = 0..N given f_0..f_N of the same kind, using
/// z f_{k-1} - k f_k and the closed forms at k = 0.
template <std::floating_point Real>
std::vector<std::complex<Real>> riccati_deriv_table(RiccatiKind kind,
                                                    const std::vector<std::complex<Real>>& f,
                                                    std::complex<Real> z) {
  std::vector<std::complex<Real>> d(f.size());
  if (f.empty()) return d;
  const std::complex<Real> i{0, 1};
  d[0] = kind == RiccatiKind::J ? std::cos(z) : std::exp(i * z);
  for (std::size_t k = 1; k < f.size(); ++k) {
    d[k] = z * f[k - 1] - Real(static_cast<double>(k)) * f[k];
  }
  return d;
}

template <std::floating_point Real>
std::complex<Real> riccati_deriv(RiccatiKind kind, int n, std::complex<Real> z) {
  if (n < 0) throw DomainError("riccati_deriv: negative order");
  const auto f = kind == RiccatiKind::J ? sph_bessel_j_table(n, z) : sph_hankel1_table(n, z);
  return riccati_deriv_table(kind, f, z).back();
}

/// ln(m!!) for odd m >= 1, by compensated summation of ln k.
inline double log_double_factorial(int m) {
  if (m < 1 || m % 2 == 0) {
    throw DomainError("log_double_factorial: argument must be an odd positive integer");
  }
  double sum = 0.0;
  double carry = 0.0;
  for (int k = 3; k <= m; k += 2) {
    const double term = std::log(static_cast<double>(k));
    const double t = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + carry;
}

}  // namespace lhsphere::specfun
