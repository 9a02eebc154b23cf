#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace lhsphere::cli {

enum class SweepVariable { Ka, Rho };

/// A one-dimensional parameter grid; the other parameters are held fixed by
/// the command that consumes it.
struct SweepSpec {
  SweepVariable variable = SweepVariable::Ka;
  double min = 0.5;
  double max = 2.0;
  long long steps = 100;

  void validate() const {
    if (!std::isfinite(min) || !std::isfinite(max) || !(min > 0.0)) {
      throw std::invalid_argument("sweep: bounds must be positive and finite");
    }
    if (!(min < max)) throw std::invalid_argument("sweep: min must be smaller than max");
    if (steps < 2 || steps > 10'000'000) throw std::invalid_argument("sweep: steps must lie in [2, 1e7]");
    if (variable == SweepVariable::Rho && min < 1.0) throw std::invalid_argument("sweep: rho must be >= 1");
  }

  /// Inclusive uniform grid; steps = 2 gives exactly the two endpoints.
  std::vector<double> grid() const {
    std::vector<double> g(static_cast<std::size_t>(steps));
    const double span = max - min;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = min + span * static_cast<double>(i) / static_cast<double>(g.size() - 1);
    }
    g.back() = max;
    return g;
  }
};

/// Figure grid: `count` points uniformly covering the half-open (lo, hi].
inline std::vector<double> half_open_grid(double lo, double hi, std::size_t count) {
  std::vector<double> g(count);
  const double step = (hi - lo) / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo + step * static_cast<double>(i + 1);
  g.back() = hi;
  return g;
}

struct GridPoint {
  double value;
  bool refined;
};

/// Uniform points plus extra points (e.g. resonance centres), sorted, with
/// the extras flagged. Extras outside [front, back] are dropped.
inline std::vector<GridPoint> merge_refinement(const std::vector<double>& uniform, std::vector<double> extra) {
  std::vector<GridPoint> out;
  out.reserve(uniform.size() + extra.size());
  for (double v : uniform) out.push_back({v, false});
  if (!uniform.empty()) {
    for (double v : extra) {
      if (v >= uniform.front() && v <= uniform.back()) out.push_back({v, true});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const GridPoint& a, const GridPoint& b) { return a.value < b.value; });
  return out;
}

}  // namespace lhsphere::cli
