#pragma once

// Argument parsing and dispatch for the `lhsphere` executable.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/output.hpp"
#include "lhsphere/errors.hpp"
#include "lhsphere/parallel.hpp"

namespace lhsphere::cli {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// key=value lines, `#` comments, blank lines ignored. Returns `--key=value` tokens.
inline std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty() || key == "config") throw UsageError(path + ":" + std::to_string(lineno) + ": bad key");
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

/// Finds a `--config` value anywhere in the arguments.
inline std::optional<std::string> config_path(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  return path;
}

inline cplx complex_flag(const std::string& name, const std::string& text) {
  try {
    return parse_complex(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError("--" + name + ": " + e.what());
  }
}

inline Format record_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "jsonl") return Format::Jsonl;
  throw UsageError("--format must be csv or jsonl here, got '" + s + "'");
}

inline std::vector<Polarization> polarization_set(const std::string& s) {
  if (s == "TM") return {Polarization::TM};
  if (s == "TE") return {Polarization::TE};
  return {Polarization::TM, Polarization::TE};
}

struct MaterialFlags {
  std::string eps1 = "1", mu1 = "1", eps2 = "1", mu2 = "1";

  void attach(CLI::App* cmd, bool exterior = true) {
    cmd->add_option("--eps1", eps1, "interior permittivity, re or re+imj")->capture_default_str();
    cmd->add_option("--mu1", mu1, "interior permeability")->capture_default_str();
    if (exterior) {
      cmd->add_option("--eps2", eps2, "exterior permittivity")->capture_default_str();
      cmd->add_option("--mu2", mu2, "exterior permeability")->capture_default_str();
    }
  }

  Materials resolve() const {
    return {complex_flag("eps1", eps1), complex_flag("mu1", mu1), complex_flag("eps2", eps2),
            complex_flag("mu2", mu2)};
  }
};

}  // namespace detail

/// Runs the tool on `args` (program name excluded). Records go to `out` (or
/// to --output), messages to `err`. Returns the exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decay rates of an atom near a sphere with arbitrary-sign permittivity and permeability", "lhsphere"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("lhsphere ") + kVersion);

  std::string format;
  std::string output;
  std::string config;
  auto common = [&](CLI::App* cmd, const char* format_help) {
    cmd->add_option("--format", format, format_help);
    cmd->add_option("--output,-o", output, "write records to this file instead of stdout");
    cmd->add_option("--config", config, "key=value file of defaults; flags take precedence");
  };

  // rates
  detail::MaterialFlags rates_mat;
  RatesOptions rates;
  std::string rates_sweep = "ka", transition = "both", orientation = "all";
  std::optional<double> ka_min, ka_max, rho_min, rho_max;
  long long steps = 100;
  auto* c_rates = app.add_subcommand("rates", "normalized E1/M1 decay rates over a ka or rho sweep");
  rates_mat.attach(c_rates);
  common(c_rates, "csv or jsonl");
  c_rates->add_option("--sweep", rates_sweep, "swept variable")->check(CLI::IsMember({"ka", "rho"}))->capture_default_str();
  c_rates->add_option("--ka-min", ka_min, "sweep start (ka sweep)");
  c_rates->add_option("--ka-max", ka_max, "sweep end (ka sweep)");
  c_rates->add_option("--rho-min", rho_min, "sweep start (rho sweep)");
  c_rates->add_option("--rho-max", rho_max, "sweep end (rho sweep)");
  c_rates->add_option("--steps", steps, "grid points, endpoints included")->capture_default_str();
  c_rates->add_option("--rho", rates.rho, "atom distance r/a for ka sweeps")->capture_default_str();
  c_rates->add_option("--ka", rates.ka, "size parameter for rho sweeps")->capture_default_str();
  c_rates->add_option("--transition", transition)->check(CLI::IsMember({"e1", "m1", "both"}))->capture_default_str();
  c_rates->add_option("--orientation", orientation)
      ->check(CLI::IsMember({"radial", "tangential", "average", "all"}))
      ->capture_default_str();
  c_rates->add_option("--rel-tol", rates.rel_tol, "series relative tolerance")->capture_default_str();
  c_rates->add_option("--n-cap", rates.n_cap, "hard cap on multipole order")->capture_default_str();
  c_rates->add_flag("--refine", rates.refine, "insert rows at polished resonance centres");
  c_rates->add_option("--refine-n-max", rates.refine_n_max, "highest order searched by --refine")
      ->capture_default_str();

  // mie
  detail::MaterialFlags mie_mat;
  MieOptions mie;
  std::string mie_pol = "TE";
  double mie_min = 0.5, mie_max = 2.0;
  long long mie_steps = 100;
  auto* c_mie = app.add_subcommand("mie", "one reflection coefficient over a ka sweep");
  mie_mat.attach(c_mie);
  common(c_mie, "csv or jsonl");
  c_mie->add_option("--ka-min", mie_min)->capture_default_str();
  c_mie->add_option("--ka-max", mie_max)->capture_default_str();
  c_mie->add_option("--steps", mie_steps)->capture_default_str();
  c_mie->add_option("--n", mie.n, "multipole order")->capture_default_str();
  c_mie->add_option("--polarization", mie_pol)->check(CLI::IsMember({"TM", "TE"}))->capture_default_str();
  c_mie->add_flag("--refine", mie.refine, "insert rows at polished resonance centres");

  // modes
  detail::MaterialFlags modes_mat;
  ModesOptions modes;
  std::string modes_pol = "both", kind = "surface";
  auto* c_modes = app.add_subcommand("modes", "resonance table: asymptotic estimates, polished roots, Q");
  modes_mat.attach(c_modes);
  common(c_modes, "csv or jsonl");
  c_modes->add_option("--n-min", modes.n_min)->capture_default_str();
  c_modes->add_option("--n-max", modes.n_max)->capture_default_str();
  c_modes->add_option("--polarization", modes_pol)->check(CLI::IsMember({"TM", "TE", "both"}))->capture_default_str();
  c_modes->add_option("--ka-min", modes.x_min)->capture_default_str();
  c_modes->add_option("--ka-max", modes.x_max)->capture_default_str();
  c_modes->add_option("--grid", modes.grid, "seed grid points along real ka")->capture_default_str();
  c_modes->add_option("--kind", kind, "surface modes only, or all roots")
      ->check(CLI::IsMember({"surface", "all"}))
      ->capture_default_str();

  // rays
  detail::MaterialFlags rays_mat;
  RaysOptions rays;
  auto* c_rays = app.add_subcommand("rays", "geometric-optics ray fan through the sphere");
  rays_mat.attach(c_rays, false);
  common(c_rays, "svg (default) or csv");
  c_rays->add_option("--source-x", rays.source_x)->capture_default_str();
  c_rays->add_option("--source-y", rays.source_y)->capture_default_str();
  c_rays->add_option("--fan", rays.fan, "number of rays")->capture_default_str();
  c_rays->add_option("--bounces", rays.bounces, "internal reflections allowed")->capture_default_str();

  // figure
  std::string preset;
  auto* c_fig = app.add_subcommand("figure", "figure presets: fig2, fig3 (rays), fig4 (p_8), fig5 (E1), fig6 (M1)");
  common(c_fig, "csv or jsonl; svg or csv for fig2/fig3");
  c_fig->add_option("preset", preset)->required()->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "fig6"}));

  std::ostringstream buffer;
  try {
    if (const auto path = detail::config_path(args)) {
      const auto injected = detail::read_config(*path);
      const auto sub = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
        return a == "rates" || a == "mie" || a == "modes" || a == "rays" || a == "figure";
      });
      if (sub != args.end()) args.insert(sub + 1, injected.begin(), injected.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "lhsphere: error: " << e.what() << '\n';
    return kExitUsage;
  }

  const unsigned threads = default_thread_count();
  int code = kExitOk;
  try {
    if (c_rates->parsed()) {
      rates.materials = rates_mat.resolve();
      rates.sweep.variable = rates_sweep == "ka" ? SweepVariable::Ka : SweepVariable::Rho;
      if (rates.sweep.variable == SweepVariable::Ka) {
        if (rho_min || rho_max) throw UsageError("--rho-min/--rho-max need --sweep rho");
        rates.sweep.min = ka_min.value_or(0.5);
        rates.sweep.max = ka_max.value_or(2.0);
      } else {
        if (ka_min || ka_max) throw UsageError("--ka-min/--ka-max need --sweep ka");
        rates.sweep.min = rho_min.value_or(1.01);
        rates.sweep.max = rho_max.value_or(3.0);
      }
      rates.sweep.steps = steps;
      rates.e1 = transition != "m1";
      rates.m1 = transition != "e1";
      rates.radial = orientation == "radial" || orientation == "all";
      rates.tangential = orientation == "tangential" || orientation == "all";
      rates.average = orientation == "average" || orientation == "all";
      rates.format = detail::record_format(format.empty() ? "csv" : format);
      rates.threads = threads;
      code = cmd_rates(rates, buffer, err);
    } else if (c_mie->parsed()) {
      mie.materials = mie_mat.resolve();
      mie.sweep = SweepSpec{SweepVariable::Ka, mie_min, mie_max, mie_steps};
      mie.polarization = mie_pol == "TM" ? Polarization::TM : Polarization::TE;
      mie.format = detail::record_format(format.empty() ? "csv" : format);
      mie.threads = threads;
      code = cmd_mie(mie, buffer, err);
    } else if (c_modes->parsed()) {
      modes.materials = modes_mat.resolve();
      modes.polarizations = detail::polarization_set(modes_pol);
      modes.all_kinds = kind == "all";
      modes.format = detail::record_format(format.empty() ? "csv" : format);
      modes.threads = threads;
      code = cmd_modes(modes, buffer, err);
    } else if (c_rays->parsed()) {
      const Materials m = rays_mat.resolve();
      rays.eps1 = m.eps1;
      rays.mu1 = m.mu1;
      if (format.empty() || format == "svg") rays.format = RaysFormat::Svg;
      else if (format == "csv") rays.format = RaysFormat::Csv;
      else throw UsageError("--format must be svg or csv for rays, got '" + format + "'");
      code = cmd_rays(rays, buffer, err);
    } else if (c_fig->parsed()) {
      if (preset == "fig2" || preset == "fig3") {
        RaysOptions opt = ray_preset(preset);
        if (format.empty() || format == "svg") opt.format = RaysFormat::Svg;
        else if (format == "csv") opt.format = RaysFormat::Csv;
        else throw UsageError("--format must be svg or csv for " + preset + ", got '" + format + "'");
        code = cmd_rays(opt, buffer, err);
      } else {
        const Format f = detail::record_format(format.empty() ? "csv" : format);
        if (preset == "fig4") code = figure_fig4(f, threads, buffer, err);
        else code = figure_rates(preset == "fig5" ? Transition::E1 : Transition::M1, f, threads, buffer, err);
      }
    }
  } catch (const std::invalid_argument& e) {
    err << "lhsphere: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "lhsphere: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "lhsphere: internal solver failure: " << e.what() << '\n';
    return kExitSolver;
  }

  if (output.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(output, std::ios::binary);
    if (!file) {
      err << "lhsphere: error: cannot open '" << output << "' for writing\n";
      return kExitUsage;
    }
    file << buffer.str();
    if (!file.flush()) {
      err << "lhsphere: error: write to '" << output << "' failed\n";
      return kExitSolver;
    }
  }
  return code;
}

}  // namespace lhsphere::cli
