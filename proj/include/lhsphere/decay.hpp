#pragma once

// Normalized spontaneous decay rates γ/γ0 of an atom at r = ρa outside a
// sphere, for E1 and M1 transitions, radial and tangential dipoles.
// With z = k2 r, ψ'(z) = d/dz[z j_n], ξ'(z) = d/dz[z h_n]:
//
//   E1 radial:     3/2 Σ n(n+1)(2n+1) |(j_n - q_n h_n)/z|²
//   E1 tangential: 3/2 Σ (n+1/2) [ |j_n - p_n h_n|² + |(ψ' - q_n ξ')/z|² ]
//
// M1 is E1 with q_n and p_n interchanged. Summation runs in ascending n
// only, so results do not depend on evaluation order.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lhsphere/core.hpp"
#include "lhsphere/mie.hpp"
#include "lhsphere/resonance.hpp"
#include "lhsphere/specfun.hpp"

namespace lhsphere::decay {

struct DecayRequest {
  SphereSystem sys;
  AtomSite site;
  double rel_tol = 1e-10;
  int n_cap = 500;
};

struct ResonantTerm {
  int n;
  Polarization polarization;
  friend bool operator==(const ResonantTerm&, const ResonantTerm&) = default;
};

struct DecayResult {
  double ratio = 0.0;
  int n_used = 0;
  double tail_bound = 0.0;
  std::vector<ResonantTerm> resonant_terms;
  std::vector<std::string> diagnostics;
};

/// The series did not meet its truncation criterion by n_cap.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double partial_sum, double tail_estimate, int n_reached)
      : std::runtime_error(what),
        partial_sum_(partial_sum),
        tail_estimate_(tail_estimate),
        n_reached_(n_reached) {}
  double partial_sum() const noexcept { return partial_sum_; }
  double tail_estimate() const noexcept { return tail_estimate_; }
  int n_reached() const noexcept { return n_reached_; }

private:
  double partial_sum_;
  double tail_estimate_;
  int n_reached_;
};

inline constexpr const char* kLossyWarning =
    "lossy media: the rate formulas assume gamma << omega and neglect absorption";

namespace detail {

inline void validate(const DecayRequest& req) {
  if (!(req.rel_tol > 0.0 && req.rel_tol <= 1e-3)) {
    throw DomainError("DecayRequest: rel_tol must lie in (0, 1e-3]");
  }
  if (req.n_cap < 1) throw DomainError("DecayRequest: n_cap must be positive");
}

// Lowest order the series may stop at. LH surface-mode terms n < n_max can
// dominate after the geometric terms have died out.
inline int truncation_floor(const DecayRequest& req, double z_abs) {
  int floor_n = static_cast<int>(std::ceil(z_abs)) + 20;
  if (classify_handedness(req.sys.interior()).is_left()) {
    for (auto pol : {Polarization::TM, Polarization::TE}) {
      double nm = 0.0;
      try {
        nm = resonance::n_max(pol, req.sys.interior(), req.sys.exterior());
      } catch (const DomainError&) {
        nm = resonance::kScanOrderCap;
      }
      if (std::isfinite(nm) && nm > 0.0) {
        nm = std::min(nm, static_cast<double>(resonance::kScanOrderCap));
        floor_n = std::max(floor_n, static_cast<int>(std::ceil(nm)) + 5);
      }
    }
  }
  return floor_n;
}

struct SeriesTables {
  std::vector<cplx> q, p;    // reflection coefficients, index = order
  std::vector<cplx> j, h;    // at z = k2 r
  std::vector<cplx> dj, dh;  // Riccati derivatives at z
  std::vector<ResonantTerm> resonant;
};

inline SeriesTables build_tables(const DecayRequest& req, int nmax, cplx zr, bool need_q, bool need_p) {
  SeriesTables t;
  const auto [z1, z2] = wave_arguments(req.sys);
  // Orders whose Bessel factors leave the double range (n >> |z|) have
  // coefficients far below 1e-300; the table stops short of them and they
  // count as zero.
  auto fill = [&](Polarization pol, std::vector<cplx>& out) {
    int top = nmax;
    std::optional<mie::ReflectionTerms> found;
    while (!found) {
      try {
        found = mie::reflection_terms(pol, top, req.sys.interior(), req.sys.exterior(), z1, z2);
      } catch (const AccuracyLossError& e) {
        top = std::min(top, e.order()) - 1;
        if (top < 1) throw;
      } catch (const SaturationError& e) {
        top = std::min(top, e.order()) - 1;
        if (top < 1) throw;
      }
    }
    const auto& terms = *found;
    out.assign(static_cast<std::size_t>(nmax) + 1, {});
    for (std::size_t k = 1; k <= static_cast<std::size_t>(top); ++k) {
      out[k] = terms.numerator[k] / terms.denominator[k];
      if (mie::detail::is_resonant(terms.numerator[k], terms.denominator[k])) {
        t.resonant.push_back({static_cast<int>(k), pol});
      }
    }
    if (top < nmax && std::abs(out[static_cast<std::size_t>(top)]) > 1e-200) {
      throw AccuracyLossError("decay series: reflection coefficients leave the double range while still significant",
                              top + 1, z2);
    }
  };
  if (need_q) fill(Polarization::TM, t.q);
  if (need_p) fill(Polarization::TE, t.p);
  t.j = specfun::sph_bessel_j_table(nmax, zr);
  t.h = specfun::sph_hankel1_table(nmax, zr);
  t.dj = specfun::riccati_deriv_table(specfun::RiccatiKind::J, t.j, zr);
  t.dh = specfun::riccati_deriv_table(specfun::RiccatiKind::H1, t.h, zr);
  return t;
}

inline DecayResult evaluate(const DecayRequest& req, Transition transition, Orientation orientation) {
  validate(req);
  const cplx z2 = wave_argument(req.sys.exterior(), req.sys.size_parameter());
  const cplx zr = z2 * req.site.rho();
  const int floor_n = truncation_floor(req, std::abs(zr));

  // E1 radial reads q, E1 tangential reads p (first term) and q (derivative
  // term); M1 swaps the two.
  const bool radial = orientation == Orientation::Radial;
  const bool electric = transition == Transition::E1;
  const bool need_q = !radial || electric;
  const bool need_p = !radial || !electric;

  int nmax = std::min(std::max(floor_n, 32), req.n_cap);
  for (;;) {
    const SeriesTables t = build_tables(req, nmax, zr, need_q, need_p);
    const std::vector<cplx>& radial_coef = electric ? t.q : t.p;
    const std::vector<cplx>& first_coef = electric ? t.p : t.q;
    const std::vector<cplx>& deriv_coef = electric ? t.q : t.p;

    double sum = 0.0;
    double prev_term = 0.0;
    int small_run = 0;
    double tail = std::numeric_limits<double>::infinity();
    std::vector<double> recent;
    for (int n = 1; n <= nmax; ++n) {
      const auto k = static_cast<std::size_t>(n);
      const double dn = n;
      double term = 0.0;
      if (radial) {
        term = 1.5 * dn * (dn + 1.0) * (2.0 * dn + 1.0) * std::norm((t.j[k] - radial_coef[k] * t.h[k]) / zr);
      } else {
        term = 1.5 * (dn + 0.5) *
               (std::norm(t.j[k] - first_coef[k] * t.h[k]) + std::norm((t.dj[k] - deriv_coef[k] * t.dh[k]) / zr));
      }
      if (!std::isfinite(term)) {
        throw ConvergenceError("decay series: non-finite term at order " + std::to_string(n), sum,
                               std::numeric_limits<double>::infinity(), n);
      }
      sum += term;

      const double ratio = prev_term > 0.0 ? term / prev_term : (term == 0.0 ? 0.0 : 1.0);
      prev_term = term;
      recent.push_back(ratio);
      if (recent.size() > 5) recent.erase(recent.begin());
      small_run = term < req.rel_tol * sum ? small_run + 1 : 0;

      if (n >= floor_n && small_run >= 5) {
        const double r = *std::max_element(recent.begin(), recent.end());
        tail = term == 0.0 ? 0.0 : (r < 1.0 ? term * r / (1.0 - r) : std::numeric_limits<double>::infinity());
        if (tail <= req.rel_tol * sum) {
          DecayResult res;
          res.ratio = sum;
          res.n_used = n;
          res.tail_bound = tail;
          for (const auto& rt : t.resonant) {
            if (rt.n <= n) res.resonant_terms.push_back(rt);
          }
          if (!req.sys.lossless()) res.diagnostics.emplace_back(kLossyWarning);
          return res;
        }
      }
    }
    if (nmax >= req.n_cap) {
      throw ConvergenceError("decay series did not converge within n_cap = " + std::to_string(req.n_cap), sum,
                             tail, nmax);
    }
    nmax = std::min(2 * nmax, req.n_cap);
  }
}

}  // namespace detail

inline DecayResult rate_e1_radial(const DecayRequest& req) {
  return detail::evaluate(req, Transition::E1, Orientation::Radial);
}

inline DecayResult rate_e1_tangential(const DecayRequest& req) {
  return detail::evaluate(req, Transition::E1, Orientation::Tangential);
}

inline DecayResult rate_m1_radial(const DecayRequest& req) {
  return detail::evaluate(req, Transition::M1, Orientation::Radial);
}

inline DecayResult rate_m1_tangential(const DecayRequest& req) {
  return detail::evaluate(req, Transition::M1, Orientation::Tangential);
}

/// Rate for the transition and orientation named by req.site.
inline DecayResult rate(const DecayRequest& req) {
  return detail::evaluate(req, req.site.transition(), req.site.orientation());
}

/// Combines separately computed radial and tangential results into the
/// isotropic average (radial + 2·tangential)/3.
inline DecayResult combine_orientation_average(const DecayResult& rad, const DecayResult& tan) {
  DecayResult avg;
  avg.ratio = (rad.ratio + 2.0 * tan.ratio) / 3.0;
  avg.n_used = std::max(rad.n_used, tan.n_used);
  avg.tail_bound = (rad.tail_bound + 2.0 * tan.tail_bound) / 3.0;
  avg.resonant_terms = rad.resonant_terms;
  for (const auto& rt : tan.resonant_terms) {
    if (std::find(avg.resonant_terms.begin(), avg.resonant_terms.end(), rt) == avg.resonant_terms.end()) {
      avg.resonant_terms.push_back(rt);
    }
  }
  avg.diagnostics = rad.diagnostics;
  return avg;
}

/// Isotropic average for req.site's transition.
inline DecayResult rate_orientation_averaged(const DecayRequest& req) {
  const Transition tr = req.site.transition();
  return combine_orientation_average(detail::evaluate(req, tr, Orientation::Radial),
                                     detail::evaluate(req, tr, Orientation::Tangential));
}

}  // namespace lhsphere::decay
