#pragma once

// High-precision reference values built with Boost.Multiprecision and
// formulas that share no code with the library: power series for j_n, the
// finite closed form for h_n, logarithmic-derivative Mie coefficients and
// fixed-length decay sums.

#include <boost/multiprecision/cpp_complex.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using mp = boost::multiprecision::cpp_complex_100;
using mpr = boost::multiprecision::cpp_bin_float_100;
using cd = std::complex<double>;

inline mp to_mp(cd z) { return mp(mpr(z.real()), mpr(z.imag())); }
inline cd to_cd(const mp& z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

/// j_n(z) = z^n/(2n+1)!! Σ_k (-z²/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1)).
inline mp bessel_j(int n, const mp& z) {
  mp pref = 1;
  for (int k = 1; k <= 2 * n + 1; k += 2) pref /= mpr(k);
  for (int k = 0; k < n; ++k) pref *= z;
  const mp w = -z * z / mpr(2);
  mp term = 1, sum = 1;
  const mpr tiny = mpr("1e-90");
  for (int k = 1; k < 100000; ++k) {
    term *= w / (mpr(k) * mpr(2 * n + 2 * k + 1));
    sum += term;
    if (abs(term) < tiny * abs(sum) && k > abs(z)) break;
  }
  return pref * sum;
}

/// h_n(z) = (-i)^(n+1) e^{iz}/z Σ_{k=0}^n (i/(2z))^k (n+k)!/(k!(n-k)!).
inline mp hankel1(int n, const mp& z) {
  const mp i(0, 1);
  mp sum = 0, pw = 1;
  mpr coef = 1;  // (n+k)!/(k!(n-k)!) built incrementally
  for (int k = 0; k <= n; ++k) {
    if (k > 0) {
      coef *= mpr(n + k) * mpr(n - k + 1) / mpr(k);
      pw *= i / (mpr(2) * z);
    }
    sum += coef * pw;
  }
  mp phase = 1;
  for (int k = 0; k < n + 1; ++k) phase *= -i;
  return phase * exp(i * z) / z * sum;
}

inline mp bessel_y(int n, const mp& z) {
  const mp i(0, 1);
  return (hankel1(n, z) - bessel_j(n, z)) / i;
}

/// d/dz [z f_n(z)] = z f_{n-1}(z) - n f_n(z).
template <class F>
mp riccati_deriv(F f, int n, const mp& z) {
  return z * f(n - 1, z) - mpr(n) * f(n, z);
}

inline mp dj(int n, const mp& z) {
  if (n == 0) return cos(z);
  return riccati_deriv(bessel_j, n, z);
}
inline mp dh(int n, const mp& z) {
  if (n == 0) return exp(mp(0, 1) * z);  // d/dz[-i e^{iz}]
  return riccati_deriv(hankel1, n, z);
}

/// Logarithmic derivative D_n(w) = ψ_n'(w)/ψ_n(w) by downward recurrence.
inline std::vector<mp> log_derivative(int nmax, const mp& w) {
  const int start = nmax + 60 + static_cast<int>(1.5 * static_cast<double>(abs(w)));
  mp d = 0;
  std::vector<mp> out(static_cast<std::size_t>(nmax) + 1);
  for (int n = start; n >= 1; --n) {
    const mp nw = mpr(n) / w;
    if (n <= nmax) out[static_cast<std::size_t>(n)] = d;
    d = nw - mpr(1) / (d + nw);
  }
  return out;
}

enum class Pol { TM, TE };

/// Textbook-form coefficient with relative index m = z1/z2:
///   c_n = [(k D_n(z1)) ψ_n(z2) - ψ_n'(z2)] / [(k D_n(z1)) ξ_n(z2) - ξ_n'(z2)]
/// where k = m ε2/ε1 (TM) or m μ2/μ1 (TE).
inline std::vector<cd> mie(Pol pol, int nmax, cd eps1, cd mu1, cd eps2, cd mu2, double x) {
  const mp z1 = sqrt(to_mp(eps1) * to_mp(mu1)) * mpr(x);
  const mp z2 = sqrt(to_mp(eps2) * to_mp(mu2)) * mpr(x);
  const mp k = pol == Pol::TM ? (z1 / z2) * to_mp(eps2) / to_mp(eps1) : (z1 / z2) * to_mp(mu2) / to_mp(mu1);
  const auto D = log_derivative(nmax, z1);
  std::vector<cd> out(static_cast<std::size_t>(nmax) + 1);
  for (int n = 1; n <= nmax; ++n) {
    const mp psi = z2 * bessel_j(n, z2);
    const mp xi = z2 * hankel1(n, z2);
    const mp kd = k * D[static_cast<std::size_t>(n)];
    out[static_cast<std::size_t>(n)] = to_cd((kd * psi - dj(n, z2)) / (kd * xi - dh(n, z2)));
  }
  return out;
}

struct Rates {
  double e1_radial, e1_tangential, m1_radial, m1_tangential;
};

/// Fixed-length decay sums; `nmax` must be well past convergence.
inline Rates rates(cd eps1, cd mu1, cd eps2, cd mu2, double x, double rho, int nmax) {
  const auto q = mie(Pol::TM, nmax, eps1, mu1, eps2, mu2, x);
  const auto p = mie(Pol::TE, nmax, eps1, mu1, eps2, mu2, x);
  const mp z = sqrt(to_mp(eps2) * to_mp(mu2)) * mpr(x * rho);
  mpr er = 0, et = 0, mr = 0, mt = 0;
  for (int n = 1; n <= nmax; ++n) {
    const mp j = bessel_j(n, z), h = hankel1(n, z), a = dj(n, z), b = dh(n, z);
    const mp qn = to_mp(q[static_cast<std::size_t>(n)]), pn = to_mp(p[static_cast<std::size_t>(n)]);
    const mpr w = mpr(n) * mpr(n + 1) * mpr(2 * n + 1);
    const mpr half = mpr(n) + mpr(0.5);
    er += w * norm((j - qn * h) / z);
    mr += w * norm((j - pn * h) / z);
    et += half * (norm(j - pn * h) + norm((a - qn * b) / z));
    mt += half * (norm(j - qn * h) + norm((a - pn * b) / z));
  }
  const mpr c = mpr(1.5);
  return {static_cast<double>(c * er), static_cast<double>(c * et), static_cast<double>(c * mr),
          static_cast<double>(c * mt)};
}

}  // namespace oracle
