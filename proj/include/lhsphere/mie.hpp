#pragma once

// TM (q_n) and TE (p_n) spherical-wave reflection coefficients of a sphere,
// valid for either sign of ε and μ in either region:
//
//   q_n = [ε1 ψ'(z2) j_n(z1) - ε2 ψ'(z1) j_n(z2)] / [ε1 ξ'(z2) j_n(z1) - ε2 ψ'(z1) h_n(z2)]
//
// with ψ'(z) = d/dz[z j_n(z)], ξ'(z) = d/dz[z h_n(z)], z_i = √(ε_i μ_i) x.
// p_n is the same expression with ε and μ interchanged. q_n coincides with
// the textbook Mie a_n (and p_n with b_n).

#include <cmath>
#include <limits>
#include <vector>

#include "lhsphere/core.hpp"
#include "lhsphere/specfun.hpp"

namespace lhsphere::mie {

struct MieCoefficient {
  Polarization polarization;
  int n;
  cplx value;
  cplx numerator;
  cplx denominator;
  // |denominator| < 1e3·eps·|numerator|: the value is dominated by the
  // conditioning of the denominator, not by physics.
  bool resonant;
};

/// Numerators and denominators for orders 1..nmax (index 0 unused) at
/// explicitly supplied interior/exterior wave arguments.
struct ReflectionTerms {
  std::vector<cplx> numerator;
  std::vector<cplx> denominator;
};

namespace detail {

inline cplx coupling(Polarization pol, const Medium& m) {
  return pol == Polarization::TM ? m.epsilon() : m.mu();
}

inline bool is_resonant(cplx num, cplx den) {
  return std::abs(den) < 1e3 * std::numeric_limits<double>::epsilon() * std::abs(num);
}

}  // namespace detail

inline ReflectionTerms reflection_terms(Polarization pol, int nmax, const Medium& interior,
                                        const Medium& exterior, cplx z1, cplx z2) {
  if (nmax < 1) throw DomainError("mie: order must be >= 1");
  const cplx c1 = detail::coupling(pol, interior);
  const cplx c2 = detail::coupling(pol, exterior);

  const auto j1 = specfun::sph_bessel_j_table(nmax, z1);
  const auto j2 = specfun::sph_bessel_j_table(nmax, z2);
  const auto h2 = specfun::sph_hankel1_table(nmax, z2);
  const auto dj1 = specfun::riccati_deriv_table(specfun::RiccatiKind::J, j1, z1);
  const auto dj2 = specfun::riccati_deriv_table(specfun::RiccatiKind::J, j2, z2);
  const auto dh2 = specfun::riccati_deriv_table(specfun::RiccatiKind::H1, h2, z2);

  ReflectionTerms t;
  t.numerator.assign(static_cast<std::size_t>(nmax) + 1, {});
  t.denominator.assign(static_cast<std::size_t>(nmax) + 1, {});
  for (std::size_t k = 1; k <= static_cast<std::size_t>(nmax); ++k) {
    t.numerator[k] = c1 * dj2[k] * j1[k] - c2 * dj1[k] * j2[k];
    t.denominator[k] = c1 * dh2[k] * j1[k] - c2 * dj1[k] * h2[k];
  }
  return t;
}

inline MieCoefficient coefficient_at(Polarization pol, int n, const Medium& interior,
                                     const Medium& exterior, cplx z1, cplx z2) {
  const auto t = reflection_terms(pol, n, interior, exterior, z1, z2);
  const cplx num = t.numerator.back();
  const cplx den = t.denominator.back();
  return {pol, n, num / den, num, den, detail::is_resonant(num, den)};
}

/// Coefficients for orders 1..nmax of one polarization (element k-1 is order k).
inline std::vector<MieCoefficient> coefficients(Polarization pol, int nmax, const SphereSystem& sys) {
  const auto [z1, z2] = wave_arguments(sys);
  const auto t = reflection_terms(pol, nmax, sys.interior(), sys.exterior(), z1, z2);
  std::vector<MieCoefficient> out;
  out.reserve(static_cast<std::size_t>(nmax));
  for (int k = 1; k <= nmax; ++k) {
    const cplx num = t.numerator[static_cast<std::size_t>(k)];
    const cplx den = t.denominator[static_cast<std::size_t>(k)];
    out.push_back({pol, k, num / den, num, den, detail::is_resonant(num, den)});
  }
  return out;
}

inline MieCoefficient coefficient(Polarization pol, int n, const SphereSystem& sys) {
  const auto [z1, z2] = wave_arguments(sys);
  return coefficient_at(pol, n, sys.interior(), sys.exterior(), z1, z2);
}

inline cplx q_tm(int n, const SphereSystem& sys) { return coefficient(Polarization::TM, n, sys).value; }

inline cplx p_te(int n, const SphereSystem& sys) { return coefficient(Polarization::TE, n, sys).value; }

/// Mie denominator at a complex size parameter; its zeros are the resonances.
inline cplx denominator(Polarization pol, int n, const Medium& interior, const Medium& exterior,
                        cplx x) {
  const cplx z1 = wave_argument(interior, x);
  const cplx z2 = wave_argument(exterior, x);
  return reflection_terms(pol, n, interior, exterior, z1, z2).denominator.back();
}

inline cplx denominator(Polarization pol, int n, const SphereSystem& sys) {
  return denominator(pol, n, sys.interior(), sys.exterior(), cplx{sys.size_parameter(), 0.0});
}

}  // namespace lhsphere::mie
