#pragma once

// Command-line front end. Exit codes: 0 success, 2 invalid input or usage,
// 3 model violation during a simulation (partial outputs are flagged).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wildfire/error.hpp"
#include "wildfire/finsler.hpp"
#include "wildfire/output.hpp"
#include "wildfire/propagation.hpp"
#include "wildfire/rothermel.hpp"
#include "wildfire/scenario_io.hpp"
#include "wildfire/units.hpp"

namespace wildfire::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitModelViolation = 3;

namespace detail {

inline void emit(std::ostream& out, bool csv, const char* name, double value) {
  if (csv) out << name << ',' << io::format_number(value) << '\n';
  else {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-16s", name);
    out << buf << io::format_number(value) << '\n';
  }
}

inline void print_chain(std::ostream& out, const rothermel::ChainIntermediates& ch, bool csv) {
  if (csv) out << "quantity,value\n";
  emit(out, csv, "rho_b", ch.packing.rho_b);
  emit(out, csv, "beta", ch.packing.beta);
  emit(out, csv, "beta_op", ch.packing.beta_op);
  emit(out, csv, "A", ch.A);
  emit(out, csv, "gamma_max", ch.gamma_max);
  emit(out, csv, "gamma", ch.gamma);
  emit(out, csv, "w_n", ch.w_n);
  emit(out, csv, "r_M", ch.r_M);
  emit(out, csv, "eta_M", ch.eta_M);
  emit(out, csv, "eta_s", ch.eta_s);
  emit(out, csv, "I_R", ch.I_R);
  emit(out, csv, "xi", ch.xi);
  emit(out, csv, "C", ch.C);
  emit(out, csv, "B", ch.B);
  emit(out, csv, "E", ch.E);
  emit(out, csv, "epsilon", ch.epsilon);
  emit(out, csv, "epsilon_sigma", ch.epsilon_standard);
  emit(out, csv, "Q_ig", ch.Q_ig);
  emit(out, csv, "z", ch.z);
  emit(out, csv, "e", ch.e);
  const auto& p = ch.params;
  emit(out, csv, "R0", p.R0);
  emit(out, csv, "phi_s", p.phi_s);
  emit(out, csv, "phi_w", p.phi_w);
  emit(out, csv, "U", p.U);
  emit(out, csv, "theta_hat", p.theta_hat);
  emit(out, csv, "R_H", p.R_H);
  emit(out, csv, "R_B", p.R_B);
  emit(out, csv, "a", p.a);
  emit(out, csv, "b", p.b);
  emit(out, csv, "c", p.c);
}

/// Writes through a temporary file so a reader never sees a half-written output.
inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidInput("out-dir", "cannot write '" + path.string() + "'");
    f << content;
    if (!f) throw InvalidInput("out-dir", "write failed for '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

struct SpreadArgs {
  rothermel::FuelBed fuel;
  double U = 0.0;
  std::string U_unit = "ft/min";
  double tan_phi = 0.0;
  double theta_hat_deg = 0.0;
  std::string scenario;
  int stage = 1;
  std::string format = "text";
  bool standard = false;
};

inline int spread_params(const SpreadArgs& a, std::ostream& out) {
  const auto variant = a.standard ? rothermel::RothermelVariant::kStandard
                                  : rothermel::RothermelVariant::kDefault;
  rothermel::FuelBed fuel = a.fuel;
  rothermel::Environment env;
  if (!a.scenario.empty()) {
    const auto file = io::load_scenario(a.scenario);
    const auto& stages = file.scenario.stages;
    if (a.stage < 1 || a.stage > static_cast<int>(stages.size()))
      throw InvalidInput("stage", "no such stage in the scenario");
    const auto* in = std::get_if<FuelInputs>(&stages[a.stage - 1].model.source);
    if (!in) throw InvalidInput("stage", "stage model has no fuel inputs");
    fuel = in->fuel;
    env = in->env;
  } else {
    env.U = units::convert_speed(a.U, units::parse_speed(a.U_unit), units::Speed::kFeetPerMinute);
    env.tan_phi = a.tan_phi;
    env.theta_hat = a.theta_hat_deg * std::numbers::pi / 180.0;
  }
  const auto chain = rothermel::evaluate_chain(fuel, env, variant);
  print_chain(out, chain, a.format == "csv");
  return kExitOk;
}

struct IndicatrixArgs {
  std::optional<double> R0, phi_s, phi_w, U, a, b, c;
  std::string U_unit = "ft/min";
  double theta_hat_deg = 0.0;
  double x = 0.0, y = 0.0, T = 1.0;
  int n = 64;
  std::string out;
};

inline MetricModel indicatrix_model(const IndicatrixArgs& a) {
  const double theta_hat = a.theta_hat_deg * std::numbers::pi / 180.0;
  if (a.a || a.b || a.c) {
    if (!(a.a && a.b && a.c)) throw InvalidInput("a", "--a, --b and --c go together");
    const double U = a.U ? units::convert_speed(*a.U, units::parse_speed(a.U_unit),
                                                units::Speed::kFeetPerMinute)
                         : 0.0;
    return MetricModel::model2(*a.a, *a.b, *a.c, theta_hat, U);
  }
  if (!a.R0) throw InvalidInput("R0", "give --R0 (with --phi_s) or --a/--b/--c");
  DirectInputs d;
  d.R0 = *a.R0;
  d.phi_s = a.phi_s.value_or(0.0);
  d.phi_w = a.phi_w.value_or(0.0);
  d.U = a.U ? units::convert_speed(*a.U, units::parse_speed(a.U_unit), units::Speed::kFeetPerMinute)
            : 0.0;
  d.theta_hat = theta_hat;
  return build_model({d}, units::Length::kKilometer);
}

inline int indicatrix(const IndicatrixArgs& a, std::ostream& out) {
  const MetricModel model = indicatrix_model(a);
  if (!(a.T > 0.0)) throw InvalidInput("T", "must be positive");
  const Point p{a.x, a.y};
  std::ostringstream rows;
  rows << "theta,x,y\n";
  for (int i = 0; i < a.n; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / a.n;
    const Point q = model.position_independent()
                        ? p + a.T * unit_vector_at_angle(model, p, theta)
                        : exponential_front_point(model, p, theta, a.T);
    rows << io::format_number(theta) << ',' << io::format_number(q.x) << ','
         << io::format_number(q.y) << '\n';
  }
  if (a.out.empty()) out << rows.str();
  else write_file(a.out, rows.str());
  return kExitOk;
}

struct SimulateArgs {
  std::string scenario;
  std::string out_dir = ".";
  std::string format = "csv";
  long seed = 0;  // reserved; the pipeline is deterministic
  bool standard = false;
  bool no_untangle = false;
};

inline int simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const io::ScenarioFile file = io::load_scenario(a.scenario);
  RunOptions opt;
  if (a.standard) opt.variant = rothermel::RothermelVariant::kStandard;
  if (a.no_untangle) opt.untangle = false;
  const ScenarioResult result = run_scenario(file.scenario, opt);

  const std::filesystem::path dir = a.out_dir;
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& content) {
    if (name.empty()) return;
    write_file(dir / name, content);
    written.push_back(name);
  };
  {
    std::ostringstream s;
    io::write_fronts_csv(s, result.fronts);
    put(file.outputs.fronts_csv, s.str());
  }
  if (!file.outputs.rays_csv.empty()) {
    std::ostringstream s;
    io::write_rays_csv(s, result.rays);
    put(file.outputs.rays_csv, s.str());
  }
  if (!file.outputs.svg.empty()) {
    std::ostringstream s;
    io::write_svg(s, result);
    put(file.outputs.svg, s.str());
  }
  if (!file.outputs.report.empty()) {
    std::vector<std::string> listed = written;
    listed.push_back(file.outputs.report);
    put(file.outputs.report, io::report_json(result, listed).dump(2) + "\n");
  }

  out << (result.completed() ? "completed" : "stopped") << ": " << result.stages.size()
      << " stage(s), " << result.fronts.size() << " fronts";
  for (const auto& w : written) out << ", " << w;
  out << '\n';
  if (!result.completed()) {
    err << "model violation: " << result.failure << '\n';
    return kExitModelViolation;
  }
  return kExitOk;
}

}  // namespace detail

/// Runs the command line `args` (args[0] is the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fire-front propagation on sloped terrain with Finsler slope metrics"};
  app.require_subcommand(1);

  detail::SpreadArgs sp;
  auto* cmd_sp = app.add_subcommand("spread-params", "Evaluate the Rothermel frame-parameter chain");
  cmd_sp->add_option("--sigma", sp.fuel.sigma, "surface-area-to-volume ratio (1/ft)");
  cmd_sp->add_option("--w_o", sp.fuel.w_o, "oven-dry fuel load (lb/ft^2)");
  cmd_sp->add_option("--delta", sp.fuel.delta, "fuel bed depth (ft)");
  cmd_sp->add_option("--M_x", sp.fuel.M_x, "moisture of extinction (fraction)");
  cmd_sp->add_option("--M_f", sp.fuel.M_f, "fuel moisture (fraction)");
  cmd_sp->add_option("--heat", sp.fuel.h, "low heat content (Btu/lb)")->capture_default_str();
  cmd_sp->add_option("--S_T", sp.fuel.S_T, "total mineral content")->capture_default_str();
  cmd_sp->add_option("--S_e", sp.fuel.S_e, "effective mineral content")->capture_default_str();
  cmd_sp->add_option("--rho_p", sp.fuel.rho_p, "particle density (lb/ft^3)")->capture_default_str();
  cmd_sp->add_option("--U", sp.U, "mid-flame wind speed");
  cmd_sp->add_option("--U-unit", sp.U_unit, "ft/min | km/h | mph")->capture_default_str();
  cmd_sp->add_option("--tan_phi", sp.tan_phi, "slope steepness");
  cmd_sp->add_option("--theta_hat_deg", sp.theta_hat_deg, "wind direction from upslope (degrees)");
  cmd_sp->add_option("--scenario", sp.scenario, "take fuel and env from a scenario stage");
  cmd_sp->add_option("--stage", sp.stage, "stage number (1-based) with --scenario");
  cmd_sp->add_option("--format", sp.format, "text | csv")->check(CLI::IsMember({"text", "csv"}));
  cmd_sp->add_flag("--standard-rothermel", sp.standard, "divide R0 by the heat sink");

  detail::IndicatrixArgs ind;
  auto* cmd_ind = app.add_subcommand("indicatrix", "Print the spherical front of duration T around a point");
  cmd_ind->add_option("--R0", ind.R0, "no-wind rate of spread");
  cmd_ind->add_option("--phi_s", ind.phi_s, "slope factor");
  cmd_ind->add_option("--phi_w", ind.phi_w, "wind factor");
  cmd_ind->add_option("--U", ind.U, "wind speed");
  cmd_ind->add_option("--U-unit", ind.U_unit, "ft/min | km/h | mph")->capture_default_str();
  cmd_ind->add_option("--theta_hat_deg", ind.theta_hat_deg, "wind direction from upslope (degrees)");
  cmd_ind->add_option("--a", ind.a, "frame parameter a");
  cmd_ind->add_option("--b", ind.b, "frame parameter b");
  cmd_ind->add_option("--c", ind.c, "frame parameter c");
  cmd_ind->add_option("--x", ind.x, "centre x");
  cmd_ind->add_option("--y", ind.y, "centre y");
  cmd_ind->add_option("--T", ind.T, "duration")->capture_default_str();
  cmd_ind->add_option("--n", ind.n, "number of directions (>= 4)")
      ->check(CLI::Range(4, 1000000))
      ->capture_default_str();
  cmd_ind->add_option("--out", ind.out, "write CSV here instead of stdout");

  detail::SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Run a scenario file");
  cmd_sim->add_option("--scenario", sim.scenario, "scenario file")->required();
  cmd_sim->add_option("--out-dir", sim.out_dir, "directory for outputs")->capture_default_str();
  cmd_sim->add_option("--format", sim.format, "output data format")->check(CLI::IsMember({"csv"}));
  cmd_sim->add_option("--seed", sim.seed, "reserved; results do not depend on it");
  cmd_sim->add_flag("--standard-rothermel", sim.standard, "divide R0 by the heat sink");
  cmd_sim->add_flag("--no-untangle", sim.no_untangle, "keep self-intersecting fronts");

  double cv_value = 0.0;
  std::string cv_from, cv_to;
  auto* cmd_cv = app.add_subcommand("convert-speed", "Convert a speed between ft/min, km/h and mph");
  cmd_cv->add_option("--value", cv_value, "speed")->required();
  cmd_cv->add_option("--from", cv_from, "source unit")->required();
  cmd_cv->add_option("--to", cv_to, "target unit")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (cmd_sp->parsed()) return detail::spread_params(sp, out);
    if (cmd_ind->parsed()) return detail::indicatrix(ind, out);
    if (cmd_sim->parsed()) return detail::simulate(sim, out, err);
    if (cmd_cv->parsed()) {
      const double v = units::convert_speed(cv_value, units::parse_speed(cv_from), units::parse_speed(cv_to));
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << '\n';
      return kExitOk;
    }
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ModelInvalid& e) {
    err << "invalid model: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const DegenerateFrame& e) {
    err << "invalid model: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitModelViolation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "file error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace wildfire::cli
