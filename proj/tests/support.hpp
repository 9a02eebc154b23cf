#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "lhsphere/core.hpp"

namespace testsupport {

using lhsphere::cplx;
using lhsphere::Medium;

/// Uniform in [-10, 10] with |v| >= 0.05.
inline double signed_material(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (;;) {
    const double v = u(rng);
    if (std::abs(v) >= 0.05) return v;
  }
}

inline Medium random_medium(std::mt19937_64& rng) {
  const double e = signed_material(rng);
  const double m = signed_material(rng);
  return Medium{e, m};
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double rel_diff(cplx a, cplx b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace testsupport
