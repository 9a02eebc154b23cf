#pragma once

// Subcommand bodies. Each takes a fully validated options struct, writes
// records to `out` and warnings to `err`, and returns the process exit code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cli/output.hpp"
#include "cli/sweep.hpp"
#include "lhsphere/lhsphere.hpp"
#include "lhsphere/parallel.hpp"

namespace lhsphere::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;

/// Bad parameters: exit code 2.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct Materials {
  cplx eps1{1.0, 0.0};
  cplx mu1{1.0, 0.0};
  cplx eps2{1.0, 0.0};
  cplx mu2{1.0, 0.0};

  Medium interior() const { return Medium{eps1, mu1}; }
  Medium exterior() const { return Medium{eps2, mu2}; }

  void echo(Metadata& m) const {
    m.add("eps1", eps1);
    m.add("mu1", mu1);
    m.add("eps2", eps2);
    m.add("mu2", mu2);
  }
};

inline std::string sweep_name(SweepVariable v) { return v == SweepVariable::Ka ? "ka" : "rho"; }

/// Real-axis positions of the polished resonances of every requested order
/// in [lo, hi], used to insert the narrow peaks a uniform grid would miss.
inline std::vector<double> resonance_centres(const Medium& interior, const Medium& exterior, double lo, double hi,
                                             std::vector<Polarization> pols, int n_lo, int n_hi, unsigned threads) {
  resonance::ScanRequest req;
  req.interior = interior;
  req.exterior = exterior;
  req.x_min = lo;
  req.x_max = hi;
  req.n_min = n_lo;
  req.n_max = n_hi;
  req.polarizations = std::move(pols);
  req.threads = threads;
  const auto scan = resonance::scan_modes(req);
  std::vector<double> xs;
  for (const auto& m : scan.modes) xs.push_back(m.z_root.real());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

// ---------------------------------------------------------------- rates

struct RatesOptions {
  Materials materials;
  SweepSpec sweep;
  double rho = 1.5;  // fixed when sweeping ka
  double ka = 1.0;   // fixed when sweeping rho
  bool e1 = true;
  bool m1 = true;
  bool radial = true;
  bool tangential = true;
  bool average = true;
  double rel_tol = 1e-10;
  int n_cap = 500;
  bool refine = false;
  int refine_n_max = 25;
  Format format = Format::Csv;
  unsigned threads = 1;
  std::string command_name = "rates";
  std::vector<std::pair<std::string, std::string>> extra_meta;
};

inline int cmd_rates(const RatesOptions& opt, std::ostream& out, std::ostream& err) {
  opt.sweep.validate();
  if (!(opt.rho >= 1.0)) throw UsageError("rates: rho must be >= 1");
  if (!(opt.ka > 0.0)) throw UsageError("rates: ka must be positive");
  if (!opt.e1 && !opt.m1) throw UsageError("rates: no transition selected");
  if (!opt.radial && !opt.tangential && !opt.average) throw UsageError("rates: no orientation selected");
  if (!(opt.rel_tol > 0.0 && opt.rel_tol <= 1e-3)) throw UsageError("rates: rel-tol must lie in (0, 1e-3]");
  const Medium interior = opt.materials.interior();
  const Medium exterior = opt.materials.exterior();

  std::vector<double> extra;
  if (opt.refine && opt.sweep.variable == SweepVariable::Ka) {
    extra = resonance_centres(interior, exterior, opt.sweep.min, opt.sweep.max, {Polarization::TM, Polarization::TE},
                              1, opt.refine_n_max, opt.threads);
  }
  const auto points = merge_refinement(opt.sweep.grid(), extra);

  std::vector<std::string> columns{"ka", "rho"};
  std::vector<Transition> transitions;
  if (opt.e1) transitions.push_back(Transition::E1);
  if (opt.m1) transitions.push_back(Transition::M1);
  for (Transition t : transitions) {
    const std::string p = t == Transition::E1 ? "e1_" : "m1_";
    if (opt.radial) columns.push_back(p + "radial");
    if (opt.tangential) columns.push_back(p + "tangential");
    if (opt.average) columns.push_back(p + "average");
  }
  columns.push_back("n_used");
  columns.push_back("refined");

  Metadata meta;
  opt.materials.echo(meta);
  meta.add("sweep", sweep_name(opt.sweep.variable));
  meta.add("min", opt.sweep.min);
  meta.add("max", opt.sweep.max);
  meta.add("steps", std::to_string(opt.sweep.steps));
  if (opt.sweep.variable == SweepVariable::Ka) meta.add("rho", opt.rho);
  else meta.add("ka", opt.ka);
  meta.add("rel_tol", opt.rel_tol);
  meta.add("n_cap", std::to_string(opt.n_cap));
  meta.add("refine", opt.refine ? "1" : "0");
  for (const auto& [k, v] : opt.extra_meta) meta.add(k, v);
  if (!(interior.lossless() && exterior.lossless())) meta.add("warning", decay::kLossyWarning);

  struct Row {
    std::vector<Cell> cells;
    std::vector<std::string> warnings;
  };
  std::vector<Row> rows(points.size());
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    const double ka = opt.sweep.variable == SweepVariable::Ka ? points[i].value : opt.ka;
    const double rho = opt.sweep.variable == SweepVariable::Rho ? points[i].value : opt.rho;
    Row& row = rows[i];
    row.cells = {ka, rho};
    long long n_used = 0;
    for (Transition t : transitions) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      double rad = nan, tan = nan, avg = nan;
      try {
        const decay::DecayRequest base{SphereSystem{interior, exterior, ka}, AtomSite{rho, t, Orientation::Radial},
                                       opt.rel_tol, opt.n_cap};
        std::optional<decay::DecayResult> r, g;
        if (opt.radial || opt.average) r = decay::detail::evaluate(base, t, Orientation::Radial);
        if (opt.tangential || opt.average) g = decay::detail::evaluate(base, t, Orientation::Tangential);
        if (r) {
          rad = r->ratio;
          n_used = std::max<long long>(n_used, r->n_used);
        }
        if (g) {
          tan = g->ratio;
          n_used = std::max<long long>(n_used, g->n_used);
        }
        if (r && g) avg = decay::combine_orientation_average(*r, *g).ratio;
      } catch (const std::exception& e) {
        std::ostringstream w;
        w << "warning: ka=" << format_number(ka) << " rho=" << format_number(rho) << ' '
          << (t == Transition::E1 ? "E1" : "M1") << ": " << e.what();
        row.warnings.push_back(w.str());
      }
      if (opt.radial) row.cells.emplace_back(rad);
      if (opt.tangential) row.cells.emplace_back(tan);
      if (opt.average) row.cells.emplace_back(avg);
    }
    row.cells.emplace_back(n_used);
    row.cells.emplace_back(static_cast<long long>(points[i].refined ? 1 : 0));
  });

  RecordWriter writer(out, opt.format, opt.command_name, meta, columns);
  for (const Row& row : rows) {
    for (const auto& w : row.warnings) err << w << '\n';
    writer.write(row.cells);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- mie

struct MieOptions {
  Materials materials;
  SweepSpec sweep;
  int n = 1;
  Polarization polarization = Polarization::TE;
  bool refine = false;
  Format format = Format::Csv;
  unsigned threads = 1;
};

inline int cmd_mie(const MieOptions& opt, std::ostream& out, std::ostream& err) {
  opt.sweep.validate();
  if (opt.sweep.variable != SweepVariable::Ka) throw UsageError("mie: only ka sweeps are meaningful");
  if (opt.n < 1) throw UsageError("mie: n must be >= 1");
  const Medium interior = opt.materials.interior();
  const Medium exterior = opt.materials.exterior();
  std::vector<double> extra;
  if (opt.refine) {
    extra = resonance_centres(interior, exterior, opt.sweep.min, opt.sweep.max, {opt.polarization}, opt.n, opt.n,
                              opt.threads);
  }
  const auto points = merge_refinement(opt.sweep.grid(), extra);

  Metadata meta;
  opt.materials.echo(meta);
  meta.add("n", std::to_string(opt.n));
  meta.add("polarization", std::string(to_string(opt.polarization)));
  meta.add("min", opt.sweep.min);
  meta.add("max", opt.sweep.max);
  meta.add("steps", std::to_string(opt.sweep.steps));
  meta.add("refine", opt.refine ? "1" : "0");

  std::vector<std::vector<Cell>> rows(points.size());
  std::vector<std::string> warnings(points.size());
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    const double ka = points[i].value;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double a = nan, re = nan, im = nan, den = nan;
    long long resonant = 0;
    try {
      const auto c = mie::coefficient(opt.polarization, opt.n, SphereSystem{interior, exterior, ka});
      a = std::abs(c.value);
      re = c.value.real();
      im = c.value.imag();
      den = std::abs(c.denominator);
      resonant = c.resonant ? 1 : 0;
    } catch (const std::exception& e) {
      warnings[i] = "warning: ka=" + format_number(ka) + ": " + e.what();
    }
    rows[i] = {ka, a, re, im, den, resonant, static_cast<long long>(points[i].refined ? 1 : 0)};
  });

  RecordWriter writer(out, opt.format, "mie", meta,
                      {"ka", "abs_coef", "re_coef", "im_coef", "abs_denominator", "resonant", "refined"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!warnings[i].empty()) err << warnings[i] << '\n';
    writer.write(rows[i]);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- modes

struct ModesOptions {
  Materials materials;
  int n_min = 1;
  int n_max = 25;
  std::vector<Polarization> polarizations{Polarization::TM, Polarization::TE};
  double x_min = 0.05;
  double x_max = 10.0;
  int grid = 2000;
  bool all_kinds = false;
  Format format = Format::Csv;
  unsigned threads = 1;
};

inline int cmd_modes(const ModesOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.n_min < 1 || opt.n_max < opt.n_min) throw UsageError("modes: need 1 <= n-min <= n-max");
  if (!(opt.x_min > 0.0 && opt.x_max > opt.x_min)) throw UsageError("modes: need 0 < ka-min < ka-max");
  if (opt.grid < 3) throw UsageError("modes: grid must have at least 3 points");
  const Medium interior = opt.materials.interior();
  const Medium exterior = opt.materials.exterior();

  resonance::ScanRequest req;
  req.interior = interior;
  req.exterior = exterior;
  req.x_min = opt.x_min;
  req.x_max = opt.x_max;
  req.grid_points = opt.grid;
  req.n_min = opt.n_min;
  req.n_max = opt.n_max;
  req.polarizations = opt.polarizations;
  req.threads = opt.threads;
  const auto scan = resonance::scan_modes(req);

  Metadata meta;
  opt.materials.echo(meta);
  meta.add("interior_handedness", std::string(to_string(classify_handedness(interior).classification)));
  meta.add("n_range", std::to_string(opt.n_min) + ".." + std::to_string(opt.n_max));
  meta.add("ka_range", format_number(opt.x_min) + ".." + format_number(opt.x_max));
  meta.add("kinds", opt.all_kinds ? "all" : "surface");
  for (Polarization pol : {Polarization::TM, Polarization::TE}) {
    const std::string key = std::string("n_max_") + std::string(to_string(pol));
    try {
      const double nm = resonance::n_max(pol, interior, exterior);
      const int count = nm > 1.0 ? static_cast<int>(std::ceil(nm)) - 1 : 0;
      meta.add(key, format_number(nm) + (count > 0 ? " (surface modes possible for n = 1.." + std::to_string(count) + ")"
                                                   : " (no surface modes)"));
    } catch (const DomainError&) {
      meta.add(key, "divergent");
    }
    const auto surface = std::count_if(scan.modes.begin(), scan.modes.end(), [&](const auto& m) {
      return m.polarization == pol && m.kind == resonance::ModeKind::Surface;
    });
    meta.add(std::string("surface_modes_") + std::string(to_string(pol)), std::to_string(surface));
  }
  for (const auto& d : scan.diagnostics) {
    meta.add("diagnostic", d);
    err << "note: " << d << '\n';
  }

  RecordWriter writer(out, opt.format, "modes", meta,
                      {"polarization", "n", "kind", "asym_re_z", "asym_q", "re_z", "im_z", "q_factor", "beta",
                       "relative_residual"});
  for (const auto& m : scan.modes) {
    if (!opt.all_kinds && m.kind != resonance::ModeKind::Surface) continue;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double asym_re = nan, asym_q = nan;
    if (auto est = resonance::asymptotic_z(m.polarization, m.n, interior, exterior)) {
      asym_re = est->re_z;
      asym_q = std::exp(-est->inv_q_log);
    }
    writer.write({std::string(to_string(m.polarization)), static_cast<long long>(m.n),
                  std::string(resonance::to_string(m.kind)), asym_re, asym_q, m.z_root.real(), m.z_root.imag(),
                  m.q_factor, static_cast<long long>(m.beta), m.relative_residual()});
  }
  return kExitOk;
}

// ---------------------------------------------------------------- rays

enum class RaysFormat { Svg, Csv };

struct RaysOptions {
  cplx eps1{4.0, 0.0};
  cplx mu1{1.05, 0.0};
  double source_x = -1.5;
  double source_y = 0.0;
  int fan = 61;
  int bounces = 4;
  RaysFormat format = RaysFormat::Svg;
  std::string command_name = "rays";
};

inline void write_rays_svg(std::ostream& out, const std::vector<rays::RayPath>& fan, const Metadata& meta,
                           std::string_view command, bool left_handed, double extent) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_number(-extent) << ' '
      << format_number(-extent) << ' ' << format_number(2 * extent) << ' ' << format_number(2 * extent)
      << "\" width=\"600\" height=\"600\">\n";
  out << "<!--\n# lhsphere " << kVersion << "\n# command: " << command << '\n';
  for (const auto& [k, v] : meta.entries) out << "# " << k << ": " << v << '\n';
  out << "-->\n";
  out << "<rect x=\"" << format_number(-extent) << "\" y=\"" << format_number(-extent) << "\" width=\""
      << format_number(2 * extent) << "\" height=\"" << format_number(2 * extent) << "\" fill=\"white\"/>\n";
  out << "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"" << (left_handed ? "#fde0dd" : "#deebf7")
      << "\" stroke=\"black\" stroke-width=\"0.01\"/>\n";
  for (const auto& path : fan) {
    out << "<polyline fill=\"none\" stroke=\"#d95f02\" stroke-width=\"0.006\" points=\"";
    for (std::size_t k = 0; k < path.vertices.size(); ++k) {
      // SVG y grows downwards
      out << (k ? " " : "") << format_number(path.vertices[k].x) << ',' << format_number(0.0 - path.vertices[k].y);
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

inline int cmd_rays(const RaysOptions& opt, std::ostream& out, std::ostream& /*err*/) {
  const Medium interior{opt.eps1, opt.mu1};
  if (classify_handedness(interior).classification == HandednessClass::Mixed) {
    throw UsageError("rays: a mixed-sign medium has no real refractive index");
  }
  if (opt.fan < 1) throw UsageError("rays: fan must be >= 1");
  if (opt.bounces < 0) throw UsageError("rays: bounces must be >= 0");
  const rays::Vec2 source{opt.source_x, opt.source_y};
  if (!(rays::norm(source) > 1.0)) throw UsageError("rays: the source must lie outside the sphere (|source| > 1)");

  const auto fan = rays::trace_fan(source, interior, opt.fan, opt.bounces);
  Metadata meta;
  meta.add("eps1", opt.eps1);
  meta.add("mu1", opt.mu1);
  meta.add("signed_index", rays::SignedIndex::of(interior).value());
  meta.add("source", format_number(opt.source_x) + " " + format_number(opt.source_y));
  meta.add("fan", std::to_string(opt.fan));
  meta.add("bounces", std::to_string(opt.bounces));
  meta.add("crossing_spread", rays::crossing_spread(fan));
  meta.add("max_snell_residual", rays::max_snell_residual(fan));

  if (opt.format == RaysFormat::Svg) {
    write_rays_svg(out, fan, meta, opt.command_name, classify_handedness(interior).is_left(),
                   1.2 * rays::norm(source) + 0.3);
    return kExitOk;
  }
  RecordWriter writer(out, Format::Csv, opt.command_name, meta,
                      {"ray", "vertex", "x", "y", "launch_angle", "termination"});
  for (std::size_t r = 0; r < fan.size(); ++r) {
    for (std::size_t v = 0; v < fan[r].vertices.size(); ++v) {
      writer.write({static_cast<long long>(r), static_cast<long long>(v), fan[r].vertices[v].x, fan[r].vertices[v].y,
                    fan[r].launch_angle, std::string(rays::to_string(fan[r].termination))});
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- figures

inline constexpr double kFigureKaMin = 0.05;
inline constexpr double kFigureKaMax = 10.0;
inline constexpr std::size_t kFigurePoints = 4000;
inline constexpr double kFigureRho = 1.001;

/// |p_8| against ka for the RH (4, 1.05) and LH (-4, -1.05) spheres in vacuum.
inline int figure_fig4(Format format, unsigned threads, std::ostream& out, std::ostream& err) {
  const Medium rh{4.0, 1.05};
  const Medium lh{-4.0, -1.05};
  const Medium vac = Medium::vacuum();
  constexpr int n = 8;
  std::vector<double> extra =
      resonance_centres(rh, vac, kFigureKaMin, kFigureKaMax, {Polarization::TE}, n, n, threads);
  for (double x : resonance_centres(lh, vac, kFigureKaMin, kFigureKaMax, {Polarization::TE}, n, n, threads)) {
    extra.push_back(x);
  }
  const auto points = merge_refinement(half_open_grid(kFigureKaMin, kFigureKaMax, kFigurePoints), extra);

  Metadata meta;
  meta.add("preset", "fig4");
  meta.add("coefficient", "p_8 (TE, n = 8)");
  meta.add("rh_sphere", "eps1=4 mu1=1.05");
  meta.add("lh_sphere", "eps1=-4 mu1=-1.05");
  meta.add("exterior", "vacuum");
  meta.add("grid", "ka in (0.05, 10], 4000 uniform points plus refined resonance centres");

  std::vector<std::vector<Cell>> rows(points.size());
  std::vector<std::string> warnings(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const double ka = points[i].value;
    std::vector<Cell> row{ka};
    for (const Medium& m : {rh, lh}) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      cplx p{nan, nan};
      try {
        p = mie::p_te(n, SphereSystem{m, vac, ka});
      } catch (const std::exception& e) {
        warnings[i] += "warning: ka=" + format_number(ka) + ": " + e.what() + "\n";
      }
      row.emplace_back(std::abs(p));
      row.emplace_back(p.real());
      row.emplace_back(p.imag());
    }
    row.emplace_back(static_cast<long long>(points[i].refined ? 1 : 0));
    rows[i] = std::move(row);
  });
  RecordWriter writer(out, format, "figure fig4", meta,
                      {"ka", "abs_p8_rh", "re_p8_rh", "im_p8_rh", "abs_p8_lh", "re_p8_lh", "im_p8_lh", "refined"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    err << warnings[i];
    writer.write(rows[i]);
  }
  return kExitOk;
}

/// E1 (fig5) or M1 (fig6) rates against ka at ρ = 1.001 next to the LH sphere.
inline int figure_rates(Transition transition, Format format, unsigned threads, std::ostream& out,
                        std::ostream& err) {
  const auto grid = half_open_grid(kFigureKaMin, kFigureKaMax, kFigurePoints);
  RatesOptions opt;
  opt.materials.eps1 = -4.0;
  opt.materials.mu1 = -1.05;
  opt.sweep = SweepSpec{SweepVariable::Ka, grid.front(), grid.back(), static_cast<long long>(kFigurePoints)};
  opt.rho = kFigureRho;
  opt.e1 = transition == Transition::E1;
  opt.m1 = transition == Transition::M1;
  opt.refine = true;
  opt.format = format;
  opt.threads = threads;
  opt.command_name = transition == Transition::E1 ? "figure fig5" : "figure fig6";
  opt.extra_meta = {{"preset", transition == Transition::E1 ? "fig5" : "fig6"},
                    {"grid", "ka in (0.05, 10], 4000 uniform points plus refined resonance centres"}};
  // SweepSpec::grid() is inclusive; the half-open figure grid starts one step
  // above 0.05 and ends at 10, which the inclusive grid reproduces exactly.
  return cmd_rates(opt, out, err);
}

inline RaysOptions ray_preset(std::string_view name) {
  RaysOptions opt;
  if (name == "fig2") {
    opt.eps1 = 4.0;
    opt.mu1 = 1.05;
  } else if (name == "fig3") {
    opt.eps1 = -4.0;
    opt.mu1 = -1.05;
  } else {
    throw UsageError("unknown ray preset '" + std::string(name) + "' (expected fig2 or fig3)");
  }
  opt.source_x = -1.5;
  opt.source_y = 0.0;
  opt.fan = 61;
  opt.bounces = 4;
  opt.command_name = "figure " + std::string(name);
  return opt;
}

}  // namespace lhsphere::cli
