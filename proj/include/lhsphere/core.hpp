#pragma once

#include <cmath>
#include <complex>
#include <string_view>

#include "lhsphere/errors.hpp"

namespace lhsphere {

using cplx = std::complex<double>;

/// Complex relative permittivity and permeability of one homogeneous region.
/// Lengths everywhere in the library are in units of the sphere radius a;
/// frequency enters only through the size parameter x = ωa/c. Fields evolve
/// as exp(-iωt).
class Medium {
public:
  Medium(cplx epsilon, cplx mu) : epsilon_(epsilon), mu_(mu) {
    auto finite = [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); };
    if (!finite(epsilon) || !finite(mu)) {
      throw DomainError("Medium: epsilon and mu must be finite");
    }
    if (epsilon * mu == cplx{0.0, 0.0}) {
      throw DomainError("Medium: epsilon*mu must be nonzero");
    }
  }

  static Medium vacuum() { return Medium{1.0, 1.0}; }

  cplx epsilon() const noexcept { return epsilon_; }
  cplx mu() const noexcept { return mu_; }

  /// ε and μ interchanged: maps TM physics onto TE and E1 onto M1.
  Medium dual() const { return Medium{mu_, epsilon_}; }

  bool lossless() const noexcept { return epsilon_.imag() == 0.0 && mu_.imag() == 0.0; }

  friend bool operator==(const Medium&, const Medium&) = default;

private:
  cplx epsilon_;
  cplx mu_;
};

/// Interior (region 1) and exterior (region 2) media plus the size
/// parameter x = 2πa/λ_vac.
class SphereSystem {
public:
  SphereSystem(Medium interior, Medium exterior, double size_parameter)
      : interior_(interior), exterior_(exterior), x_(size_parameter) {
    if (!(size_parameter > 0.0) || !std::isfinite(size_parameter)) {
      throw DomainError("SphereSystem: size parameter must be positive and finite");
    }
  }

  const Medium& interior() const noexcept { return interior_; }
  const Medium& exterior() const noexcept { return exterior_; }
  double size_parameter() const noexcept { return x_; }

  SphereSystem with_size_parameter(double x) const { return {interior_, exterior_, x}; }
  SphereSystem dual() const { return {interior_.dual(), exterior_.dual(), x_}; }
  bool lossless() const noexcept { return interior_.lossless() && exterior_.lossless(); }

private:
  Medium interior_;
  Medium exterior_;
  double x_;
};

enum class HandednessClass { RightHanded, LeftHanded, Mixed };

struct Handedness {
  HandednessClass classification;

  bool is_left() const noexcept { return classification == HandednessClass::LeftHanded; }
  bool is_right() const noexcept { return classification == HandednessClass::RightHanded; }

  /// +1 for RH, -1 for LH. Mixed media have no β.
  int beta() const {
    switch (classification) {
      case HandednessClass::RightHanded: return +1;
      case HandednessClass::LeftHanded: return -1;
      case HandednessClass::Mixed: break;
    }
    throw DomainError("Handedness: beta is undefined for a mixed-sign medium");
  }
};

inline Handedness classify_handedness(const Medium& m) noexcept {
  const double re_eps = m.epsilon().real();
  const double re_mu = m.mu().real();
  if (re_eps < 0.0 && re_mu < 0.0) return {HandednessClass::LeftHanded};
  if (re_eps > 0.0 && re_mu > 0.0) return {HandednessClass::RightHanded};
  return {HandednessClass::Mixed};
}

inline std::string_view to_string(HandednessClass h) noexcept {
  switch (h) {
    case HandednessClass::RightHanded: return "RH";
    case HandednessClass::LeftHanded: return "LH";
    case HandednessClass::Mixed: return "mixed";
  }
  return "?";
}

/// √(εμ)·x with the principal root of the product (never √ε·√μ), so a
/// lossless LH medium gives a real positive argument.
inline cplx wave_argument(const Medium& m, cplx x) {
  const cplx product = m.epsilon() * m.mu();
  if (product == cplx{0.0, 0.0}) throw DomainError("wave_argument: epsilon*mu = 0");
  return std::sqrt(product) * x;
}

inline cplx wave_argument(const Medium& m, double x) { return wave_argument(m, cplx{x, 0.0}); }

struct WaveArguments {
  cplx z1;  // interior
  cplx z2;  // exterior
};

inline WaveArguments wave_arguments(const SphereSystem& sys) {
  return {wave_argument(sys.interior(), sys.size_parameter()),
          wave_argument(sys.exterior(), sys.size_parameter())};
}

enum class Polarization { TM, TE };

inline std::string_view to_string(Polarization p) noexcept { return p == Polarization::TM ? "TM" : "TE"; }

enum class Transition { E1, M1 };
enum class Orientation { Radial, Tangential };

/// Atom position ρ = r/a and the transition/orientation being evaluated.
class AtomSite {
public:
  AtomSite(double rho, Transition transition, Orientation orientation)
      : rho_(rho), transition_(transition), orientation_(orientation) {
    if (!(rho >= 1.0) || !std::isfinite(rho)) {
      throw DomainError("AtomSite: rho = r/a must be finite and >= 1");
    }
  }

  double rho() const noexcept { return rho_; }
  Transition transition() const noexcept { return transition_; }
  Orientation orientation() const noexcept { return orientation_; }

private:
  double rho_;
  Transition transition_;
  Orientation orientation_;
};

}  // namespace lhsphere
