#pragma once

// Resonances of the Mie denominators in the complex size-parameter plane.
//
// Small-sphere surface modes (x ≪ n), TM; TE follows from ε ⇔ μ:
//   Re z   = sqrt( (ε2 + n(ε1+ε2)) / (ε1 ε2 (μ1/(2n+3) + μ2/(2n-1))) )
//   1/Q    = | μ2/(μ1/(2n+3) + μ2/(2n-1)) · (sqrt(ε2 μ2) z)^(2n-1) / ((2n-1)!!)² |
// exist only for 1 <= n < n_max = -ε2/(ε1+ε2). With exp(-iωt) fields the
// signed quality factor is Q = -β Re z / (2 Im z), β = +1 (RH), -1 (LH).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lhsphere/core.hpp"
#include "lhsphere/mie.hpp"
#include "lhsphere/parallel.hpp"
#include "lhsphere/specfun.hpp"

namespace lhsphere::resonance {

/// Largest order examined when n_max diverges (ε1 → -ε2 or μ1 → -μ2).
inline constexpr int kScanOrderCap = 200;

struct ResonanceEstimate {
  Polarization polarization;
  int n;
  double re_z;
  double inv_q_log;  // ln(1/Q)
};

enum class ModeKind { Surface, Volume };

inline std::string_view to_string(ModeKind k) noexcept { return k == ModeKind::Surface ? "surface" : "volume"; }

struct ResonanceMode {
  Polarization polarization;
  int n;
  cplx z_root;
  double q_factor;
  double residual;  // |denominator(z_root)|
  double scale;     // max |denominator| over the iterates
  int beta;
  ModeKind kind = ModeKind::Volume;
  int iterations = 0;
  bool used_muller = false;

  double relative_residual() const { return scale > 0.0 ? residual / scale : residual; }
};

class RootNotConverged : public std::runtime_error {
public:
  RootNotConverged(const std::string& what, cplx best, double residual)
      : std::runtime_error(what), best_(best), residual_(residual) {}
  cplx best_iterate() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }

private:
  cplx best_;
  double residual_;
};

/// Q <= 0 after applying β: the root's Im sign disagrees with the medium's
/// handedness (misclassified mode or wrong branch).
class QualitySignError : public std::runtime_error {
public:
  QualitySignError(const std::string& what, cplx z_root, int beta)
      : std::runtime_error(what), z_root_(z_root), beta_(beta) {}
  cplx z_root() const noexcept { return z_root_; }
  int beta() const noexcept { return beta_; }

private:
  cplx z_root_;
  int beta_;
};

namespace detail {

// (a, b) = (ε, μ) for TM and (μ, ε) for TE; real parts only.
struct Constants {
  double a1, a2, b1, b2;
};

inline Constants constants(Polarization pol, const Medium& interior, const Medium& exterior) {
  if (pol == Polarization::TM) {
    return {interior.epsilon().real(), exterior.epsilon().real(), interior.mu().real(), exterior.mu().real()};
  }
  return {interior.mu().real(), exterior.mu().real(), interior.epsilon().real(), exterior.epsilon().real()};
}

}  // namespace detail

/// x at which n interior wavelengths fit the perimeter, 2πa = nλ/√(ε1μ1).
/// A heuristic for whispering-gallery modes, meaningful for n ≫ 1.
inline double whispering_gallery_estimate(int n, const Medium& interior) {
  if (n < 1) throw DomainError("whispering_gallery_estimate: n must be >= 1");
  const cplx product = interior.epsilon() * interior.mu();
  if (!(product.real() > 0.0)) {
    throw DomainError("whispering_gallery_estimate: requires Re(eps1*mu1) > 0");
  }
  return n / std::sqrt(product).real();
}

/// Order limit for surface modes; throws DomainError when it diverges.
inline double n_max(Polarization pol, const Medium& interior, const Medium& exterior) {
  const auto c = detail::constants(pol, interior, exterior);
  const double sum = c.a1 + c.a2;
  if (sum == 0.0) throw DomainError("n_max diverges: interior and exterior constants cancel");
  return -c.a2 / sum;
}

/// ln(1/Q) of the small-sphere estimate at Re z = re_z.
inline double asymptotic_inv_q(Polarization pol, int n, const Medium& interior, const Medium& exterior,
                               double re_z) {
  if (n < 1) throw DomainError("asymptotic_inv_q: n must be >= 1");
  const auto c = detail::constants(pol, interior, exterior);
  const double weight = c.b1 / (2.0 * n + 3.0) + c.b2 / (2.0 * n - 1.0);
  if (weight == 0.0 || c.b2 == 0.0) throw DomainError("asymptotic_inv_q: prefactor vanishes or diverges");
  const double index2 = std::sqrt(std::abs(c.a2 * c.b2));
  return std::log(std::abs(c.b2 / weight)) + (2.0 * n - 1.0) * std::log(index2 * re_z) -
         2.0 * specfun::log_double_factorial(2 * n - 1);
}

/// Small-sphere surface-mode position. Empty unless n < n_max (any n when
/// n_max diverges) and the radicand is positive.
inline std::optional<ResonanceEstimate> asymptotic_z(Polarization pol, int n, const Medium& interior,
                                                     const Medium& exterior) {
  if (n < 1) throw DomainError("asymptotic_z: n must be >= 1");
  const auto c = detail::constants(pol, interior, exterior);
  if (const double sum = c.a1 + c.a2; sum != 0.0 && !(n < -c.a2 / sum)) return std::nullopt;
  const double numer = c.a2 + n * (c.a1 + c.a2);
  const double denom = c.a1 * c.a2 * (c.b1 / (2.0 * n + 3.0) + c.b2 / (2.0 * n - 1.0));
  if (denom == 0.0) return std::nullopt;
  const double radicand = numer / denom;
  if (!(radicand > 0.0) || !std::isfinite(radicand)) return std::nullopt;
  const double re_z = std::sqrt(radicand);
  double inv_q_log = std::numeric_limits<double>::quiet_NaN();
  try {
    inv_q_log = asymptotic_inv_q(pol, n, interior, exterior, re_z);
  } catch (const DomainError&) {
  }
  return ResonanceEstimate{pol, n, re_z, inv_q_log};
}

/// Q = -β Re z / (2 Im z). Throws QualitySignError unless the result is > 0.
inline double quality_factor(cplx z_root, const Handedness& interior_handedness) {
  const int beta = interior_handedness.beta();
  if (!(z_root.real() > 0.0) || z_root.imag() == 0.0) {
    throw DomainError("quality_factor: requires Re z > 0 and Im z != 0");
  }
  const double q = -beta * z_root.real() / (2.0 * z_root.imag());
  if (!(q > 0.0)) {
    throw QualitySignError("quality_factor: Q <= 0 for the given handedness (Im z has the wrong sign)", z_root,
                           beta);
  }
  return q;
}

struct RootOptions {
  int max_iterations = 100;
  double residual_tol = 1e-10;
};

namespace detail {

inline cplx muller_step(cplx x0, cplx x1, cplx x2, cplx f0, cplx f1, cplx f2) {
  const cplx h1 = x1 - x0;
  const cplx h2 = x2 - x1;
  const cplx d1 = (f1 - f0) / h1;
  const cplx d2 = (f2 - f1) / h2;
  const cplx a = (d2 - d1) / (h2 + h1);
  const cplx b = a * h2 + d2;
  const cplx disc = std::sqrt(b * b - 4.0 * f2 * a);
  const cplx den = std::abs(b + disc) >= std::abs(b - disc) ? b + disc : b - disc;
  if (den == cplx{0.0, 0.0}) return x2 + h2;
  return x2 - 2.0 * f2 / den;
}

}  // namespace detail

/// Root of the Mie denominator near `seed` in the complex x plane: Newton
/// with a central-difference derivative (h = 1e-6·max(1,|x|)), falling back
/// to Muller's method when Newton stops reducing |D|. The Q factor is filled
/// when the interior handedness is defined (otherwise NaN, beta = 0).
inline ResonanceMode find_root(Polarization pol, int n, const Medium& interior, const Medium& exterior,
                               cplx seed, const RootOptions& opts = {}) {
  if (!std::isfinite(seed.real()) || !std::isfinite(seed.imag())) {
    throw DomainError("find_root: seed must be finite");
  }
  auto f = [&](cplx x) { return mie::denominator(pol, n, interior, exterior, x); };

  cplx z = seed;
  cplx fz = f(z);
  double scale = std::abs(fz);
  cplx best = z;
  double best_res = std::abs(fz);
  bool muller = false;
  int stalls = 0;
  int iterations = 0;
  double prev_step = std::numeric_limits<double>::infinity();
  // Muller history
  cplx xm2 = z, xm1 = z;
  cplx fm2 = fz, fm1 = fz;

  // Polish until neither component of the step moves; the imaginary part of
  // a high-Q root can sit forty decades below Re z.
  auto converged = [&](cplx step, cplx zz) {
    if (!(best_res <= opts.residual_tol * scale)) return false;
    const double eps = std::numeric_limits<double>::epsilon();
    return std::abs(step.real()) <= 8.0 * eps * std::abs(zz) &&
           std::abs(step.imag()) <= std::max(1e-9 * std::abs(zz.imag()), 1e3 * std::numeric_limits<double>::min());
  };

  while (iterations < opts.max_iterations) {
    ++iterations;
    cplx next;
    if (!muller) {
      const double h = 1e-6 * std::max(1.0, std::abs(z));
      const cplx deriv = (f(z + h) - f(z - h)) / (2.0 * h);
      if (deriv == cplx{0.0, 0.0} || !std::isfinite(std::abs(deriv))) {
        muller = true;
        xm2 = z - h;
        xm1 = z + h;
        fm2 = f(xm2);
        fm1 = f(xm1);
        continue;
      }
      cplx step = fz / deriv;
      next = z - step;
      cplx fnext = f(next);
      for (int halving = 0; halving < 8 && std::abs(fnext) > std::abs(fz); ++halving) {
        step *= 0.5;
        next = z - step;
        fnext = f(next);
      }
      const double step_abs = std::abs(step);
      const cplx taken = step;
      if (std::abs(fnext) >= std::abs(fz) && std::abs(fz) > opts.residual_tol * scale) {
        if (++stalls >= 3) {
          muller = true;
          xm2 = z - 10.0 * h;
          xm1 = z + 10.0 * h;
          fm2 = f(xm2);
          fm1 = f(xm1);
        }
      } else {
        stalls = 0;
      }
      xm2 = xm1;
      fm2 = fm1;
      xm1 = z;
      fm1 = fz;
      z = next;
      fz = fnext;
      scale = std::max(scale, std::abs(fz));
      if (std::abs(fz) <= best_res) {
        best_res = std::abs(fz);
        best = z;
      }
      const bool done = converged(taken, z) ||
                        (best_res <= opts.residual_tol * scale && step_abs >= prev_step && step_abs < 1e-12 * std::abs(z));
      prev_step = step_abs;
      if (done) break;
    } else {
      next = detail::muller_step(xm2, xm1, z, fm2, fm1, fz);
      const cplx taken = next - z;
      const double step_abs = std::abs(taken);
      xm2 = xm1;
      fm2 = fm1;
      xm1 = z;
      fm1 = fz;
      z = next;
      fz = f(z);
      scale = std::max(scale, std::abs(fz));
      if (std::abs(fz) <= best_res) {
        best_res = std::abs(fz);
        best = z;
      }
      if (converged(taken, z) || (best_res <= opts.residual_tol * scale && step_abs < 1e-13 * std::abs(z))) {
        break;
      }
      if (fz == cplx{0.0, 0.0}) break;
    }
  }

  if (!(best_res <= opts.residual_tol * scale)) {
    throw RootNotConverged("find_root: no root to the requested residual within " +
                               std::to_string(opts.max_iterations) + " iterations",
                           best, best_res);
  }

  ResonanceMode mode{pol, n, best, std::numeric_limits<double>::quiet_NaN(), best_res, scale, 0};
  mode.iterations = iterations;
  mode.used_muller = muller;
  const Handedness hand = classify_handedness(interior);
  if (hand.classification != HandednessClass::Mixed) {
    mode.beta = hand.beta();
    mode.q_factor = quality_factor(best, hand);
  }
  return mode;
}

/// Winding number of the denominator around a circle: the number of zeros
/// (minus poles) enclosed. Samples adaptively so no phase step exceeds π/4.
inline int winding_number(Polarization pol, int n, const Medium& interior, const Medium& exterior, cplx center,
                          double radius, int samples = 64) {
  if (!(radius > 0.0) || samples < 4) throw DomainError("winding_number: bad contour");
  auto f = [&](double t) {
    return mie::denominator(pol, n, interior, exterior, center + radius * std::polar(1.0, t));
  };
  const double two_pi = 2.0 * std::numbers::pi;
  double total = 0.0;
  auto accumulate = [&](auto&& self, double t0, double t1, cplx f0, cplx f1, int depth) -> void {
    const double dphi = std::arg(f1 / f0);
    if (std::abs(dphi) > std::numbers::pi / 4.0 && depth < 20) {
      const double tm = 0.5 * (t0 + t1);
      const cplx fm = f(tm);
      self(self, t0, tm, f0, fm, depth + 1);
      self(self, tm, t1, fm, f1, depth + 1);
      return;
    }
    total += dphi;
  };
  double t_prev = 0.0;
  cplx f_prev = f(0.0);
  const cplx f_start = f_prev;
  for (int k = 1; k <= samples; ++k) {
    const double t = two_pi * k / samples;
    const cplx fk = k == samples ? f_start : f(t);
    accumulate(accumulate, t_prev, t, f_prev, fk, 0);
    t_prev = t;
    f_prev = fk;
  }
  return static_cast<int>(std::lround(total / two_pi));
}

struct ScanRequest {
  Medium interior = Medium::vacuum();
  Medium exterior = Medium::vacuum();
  double x_min = 0.05;
  double x_max = 10.0;
  int grid_points = 2000;
  int n_min = 1;
  int n_max = 25;
  std::vector<Polarization> polarizations{Polarization::TM, Polarization::TE};
  double peak_threshold = 0.5;  // minimum |coefficient| of a real-axis peak used as seed
  unsigned threads = 1;
};

struct ScanResult {
  std::vector<ResonanceMode> modes;
  std::vector<std::string> diagnostics;
  bool cap_reached = false;
};

namespace detail {

inline std::vector<double> real_axis_peaks(const std::vector<double>& xs, const std::vector<double>& mag,
                                           double threshold) {
  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    if (std::isfinite(mag[i]) && mag[i] >= threshold && mag[i] >= mag[i - 1] && mag[i] >= mag[i + 1]) {
      peaks.push_back(xs[i]);
    }
  }
  return peaks;
}

}  // namespace detail

/// Seeds each (polarization, n) from the small-sphere estimate and from
/// real-axis |coefficient| peaks, polishes with find_root, deduplicates, and
/// labels the lowest-Re root of an LH sphere with 1 <= n < n_max as the
/// surface mode. Sorted by (polarization, n, Re z).
inline ScanResult scan_modes(const ScanRequest& req) {
  if (!(req.x_min > 0.0 && req.x_max > req.x_min) || req.grid_points < 3) {
    throw DomainError("scan_modes: need 0 < x_min < x_max and at least 3 grid points");
  }
  ScanResult result;
  int n_hi = req.n_max;
  if (n_hi > kScanOrderCap) {
    n_hi = kScanOrderCap;
    result.cap_reached = true;
    result.diagnostics.push_back("order range capped at n = " + std::to_string(kScanOrderCap));
  }
  const int n_lo = std::max(1, req.n_min);
  if (n_hi < n_lo) return result;
  const auto count = static_cast<std::size_t>(n_hi - n_lo + 1);
  const bool lh = classify_handedness(req.interior).is_left();

  std::vector<double> xs(static_cast<std::size_t>(req.grid_points));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = req.x_min + (req.x_max - req.x_min) * static_cast<double>(i) / static_cast<double>(xs.size() - 1);
  }

  for (const Polarization pol : req.polarizations) {
    // |coefficient| on the grid for all orders at once.
    std::vector<std::vector<double>> mag(count, std::vector<double>(xs.size(), std::numeric_limits<double>::quiet_NaN()));
    parallel_for(xs.size(), req.threads, [&](std::size_t i) {
      try {
        const auto z1 = wave_argument(req.interior, xs[i]);
        const auto z2 = wave_argument(req.exterior, xs[i]);
        const auto terms = mie::reflection_terms(pol, n_hi, req.interior, req.exterior, z1, z2);
        for (std::size_t k = 0; k < count; ++k) {
          const auto order = static_cast<std::size_t>(n_lo) + k;
          mag[k][i] = std::abs(terms.numerator[order] / terms.denominator[order]);
        }
      } catch (const std::exception&) {
        // out of floating range at this x; leave NaN
      }
    });

    double nm = -1.0;
    bool nm_divergent = false;
    try {
      nm = n_max(pol, req.interior, req.exterior);
    } catch (const DomainError&) {
      nm_divergent = true;
    }

    std::vector<std::vector<ResonanceMode>> per_order(count);
    std::vector<std::vector<std::string>> notes(count);
    parallel_for(count, req.threads, [&](std::size_t k) {
      const int n = n_lo + static_cast<int>(k);
      std::vector<double> seeds;
      if (auto est = asymptotic_z(pol, n, req.interior, req.exterior);
          est && est->re_z >= req.x_min && est->re_z <= req.x_max) {
        seeds.push_back(est->re_z);
      }
      for (double x : detail::real_axis_peaks(xs, mag[k], req.peak_threshold)) seeds.push_back(x);

      std::vector<ResonanceMode> found;
      for (double s : seeds) {
        try {
          ResonanceMode m = find_root(pol, n, req.interior, req.exterior, cplx{s, 0.0});
          const cplx zr = m.z_root;
          if (!(zr.real() >= req.x_min && zr.real() <= req.x_max)) continue;
          const bool dup = std::any_of(found.begin(), found.end(), [&](const ResonanceMode& o) {
            return std::abs(o.z_root - zr) <= 1e-6 * std::abs(zr);
          });
          if (!dup) found.push_back(m);
        } catch (const QualitySignError& e) {
          const cplx zr = e.z_root();
          if (!(zr.real() >= req.x_min && zr.real() <= req.x_max)) continue;
          std::string note = std::string(to_string(pol)) + " n=" + std::to_string(n) + ": root at " +
                             std::to_string(zr.real()) + (zr.imag() < 0 ? "" : "+") + std::to_string(zr.imag()) +
                             "j excluded, Im sign opposite to the interior handedness";
          if (std::find(notes[k].begin(), notes[k].end(), note) == notes[k].end()) notes[k].push_back(std::move(note));
        } catch (const std::exception&) {
          // seed did not converge to an admissible root
        }
      }
      std::sort(found.begin(), found.end(),
                [](const ResonanceMode& a, const ResonanceMode& b) { return a.z_root.real() < b.z_root.real(); });
      const bool surface_order = lh && n >= 1 && (nm_divergent || static_cast<double>(n) < nm);
      if (surface_order && !found.empty()) found.front().kind = ModeKind::Surface;
      per_order[k] = std::move(found);
    });

    for (std::size_t k = 0; k < count; ++k) {
      result.modes.insert(result.modes.end(), per_order[k].begin(), per_order[k].end());
      result.diagnostics.insert(result.diagnostics.end(), notes[k].begin(), notes[k].end());
    }
  }
  std::stable_sort(result.modes.begin(), result.modes.end(), [](const ResonanceMode& a, const ResonanceMode& b) {
    if (a.polarization != b.polarization) return a.polarization == Polarization::TM;
    if (a.n != b.n) return a.n < b.n;
    return a.z_root.real() < b.z_root.real();
  });
  return result;
}

}  // namespace lhsphere::resonance
