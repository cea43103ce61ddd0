#pragma once

// Scenario files: JSON with // and /* */ comments. Unknown keys are errors.
//
//   {
//     "schema_version": 1,
//     "length_unit": "km",                        // ft | m | km
//     "initial": {"point": [0, 0]},               // or {"vertices": [[x, y], ...]} or {"csv": "front.csv"}
//     "resolution": 0.1,                          // optional target point spacing
//     "stages": [{
//       "duration": {"value": 10, "unit": "h"},   // or a number of hours
//       "method": "rays",                         // rays | huygens
//       "dt": {"value": 1, "unit": "h"},          // output cadence and Huygens step
//       "untangle": true, "n_sphere": 32, "h": 0.01,
//       "model": {"direct": {"R0": "1.8-0.6*cos(x+y)", "phi_s": 0.45,
//                            "phi_w": 0, "U": {"value": 7, "unit": "km/h"},
//                            "theta_hat_deg": 0}}
//       // or "model": {"fuel": {"sigma": ..., "w_o": ..., ...},
//       //              "env": {"U": {...}, "tan_phi": ..., "theta_hat_deg": ...}}
//     }],
//     "outputs": {"fronts_csv": "fronts.csv", "rays_csv": "rays.csv",
//                 "svg": "fronts.svg", "report": "report.json"}
//   }

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wildfire/error.hpp"
#include "wildfire/fieldexpr.hpp"
#include "wildfire/propagation.hpp"
#include "wildfire/rothermel.hpp"
#include "wildfire/units.hpp"

namespace wildfire::io {

inline constexpr int kSchemaVersion = 1;

struct OutputPaths {
  std::string fronts_csv = "fronts.csv";
  std::string rays_csv;
  std::string svg;
  std::string report = "report.json";
};

struct ScenarioFile {
  int schema_version = kSchemaVersion;
  Scenario scenario;
  OutputPaths outputs;
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& obj, const std::string& where,
                       std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw InvalidInput(where, "must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw InvalidInput(where.empty() ? key : where + "." + key, "unknown key");
  }
}

inline std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw InvalidInput(where, "must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InvalidInput(where, "must be finite");
  return v;
}

inline const json& required(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InvalidInput(join(where, key), "is required");
  return *it;
}

/// A number, or a {"value", "unit"} pair, in hours.
inline double duration(const json& j, const std::string& where) {
  if (j.is_number()) return number(j, where);
  check_keys(j, where, {"value", "unit"});
  const double v = number(required(j, where, "value"), join(where, "value"));
  const auto& u = required(j, where, "unit");
  if (!u.is_string()) throw InvalidInput(join(where, "unit"), "must be a string");
  try {
    return v * units::hours(units::parse_time(u.get<std::string>()));
  } catch (const InvalidInput& e) {
    throw InvalidInput(join(where, "unit"), e.what());
  }
}

/// A constant or an expression string.
inline field::ScalarField scalar(const json& j, const std::string& where) {
  if (j.is_number()) return number(j, where);
  if (j.is_string()) {
    try {
      return field::ScalarField::parse(j.get<std::string>());
    } catch (const Error& e) {
      throw InvalidInput(where, e.what());
    }
  }
  throw InvalidInput(where, "must be a number or an expression string");
}

inline field::ScalarField scaled(const field::ScalarField& f, double k) {
  if (auto c = f.constant_value()) return *c * k;
  return *f.as_expr() * k;
}

/// Wind speed in ft/min: a plain value is ft/min; {"value", "unit"} converts.
inline field::ScalarField wind(const json& j, const std::string& where) {
  if (!j.is_object()) return scalar(j, where);
  check_keys(j, where, {"value", "unit"});
  const field::ScalarField v = scalar(required(j, where, "value"), join(where, "value"));
  const auto& u = required(j, where, "unit");
  if (!u.is_string()) throw InvalidInput(join(where, "unit"), "must be a string");
  units::Speed unit;
  try {
    unit = units::parse_speed(u.get<std::string>());
  } catch (const InvalidInput& e) {
    throw InvalidInput(join(where, "unit"), e.what());
  }
  return scaled(v, units::feet_per_minute(unit));
}

inline Point point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw InvalidInput(where, "must be [x, y]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

inline FrontPolyline read_front_csv(const std::filesystem::path& path, const std::string& where) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(where, "cannot open '" + path.string() + "'");
  FrontPolyline f;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && (line == "x,y" || line == "x, y")) continue;
    std::istringstream ls(line);
    double x = 0.0, y = 0.0;
    char comma = 0;
    if (!(ls >> x >> comma >> y) || comma != ',')
      throw InvalidInput(where, "line " + std::to_string(lineno) + " is not 'x,y'");
    f.points.push_back({x, y});
  }
  return f;
}

inline FrontPolyline front(const json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where, "must be an array of [x, y]");
  FrontPolyline f;
  for (std::size_t i = 0; i < j.size(); ++i)
    f.points.push_back(point(j[i], where + "[" + std::to_string(i) + "]"));
  return f;
}

inline rothermel::FuelBed fuel_bed(const json& j, const std::string& where) {
  check_keys(j, where, {"sigma", "w_o", "delta", "M_x", "M_f", "h", "S_T", "S_e", "rho_p"});
  rothermel::FuelBed f;
  f.sigma = number(required(j, where, "sigma"), join(where, "sigma"));
  f.w_o = number(required(j, where, "w_o"), join(where, "w_o"));
  f.delta = number(required(j, where, "delta"), join(where, "delta"));
  f.M_x = number(required(j, where, "M_x"), join(where, "M_x"));
  f.M_f = number(required(j, where, "M_f"), join(where, "M_f"));
  if (j.contains("h")) f.h = number(j["h"], join(where, "h"));
  if (j.contains("S_T")) f.S_T = number(j["S_T"], join(where, "S_T"));
  if (j.contains("S_e")) f.S_e = number(j["S_e"], join(where, "S_e"));
  if (j.contains("rho_p")) f.rho_p = number(j["rho_p"], join(where, "rho_p"));
  try {
    rothermel::validate(f);
  } catch (const InvalidInput& e) {
    throw InvalidInput(join(where, e.field()), e.what());
  }
  return f;
}

inline rothermel::Environment environment(const json& j, const std::string& where) {
  check_keys(j, where, {"U", "tan_phi", "theta_hat_deg"});
  rothermel::Environment env;
  if (j.contains("U")) {
    const auto U = wind(j["U"], join(where, "U"));
    if (!U.is_constant()) throw InvalidInput(join(where, "U"), "must be a constant");
    env.U = *U.constant_value();
  }
  if (j.contains("tan_phi")) env.tan_phi = number(j["tan_phi"], join(where, "tan_phi"));
  if (j.contains("theta_hat_deg"))
    env.theta_hat = number(j["theta_hat_deg"], join(where, "theta_hat_deg")) * std::numbers::pi / 180.0;
  try {
    rothermel::validate(env);
  } catch (const InvalidInput& e) {
    throw InvalidInput(join(where, e.field()), e.what());
  }
  return env;
}

inline ModelSpec model(const json& j, const std::string& where) {
  check_keys(j, where, {"direct", "fuel", "env"});
  const bool direct = j.contains("direct");
  const bool fuel = j.contains("fuel");
  if (direct == fuel) throw InvalidInput(where, "exactly one of 'direct' or 'fuel' is required");
  ModelSpec spec;
  if (direct) {
    if (j.contains("env")) throw InvalidInput(join(where, "env"), "only allowed with 'fuel'");
    const auto& d = j["direct"];
    const std::string w = join(where, "direct");
    check_keys(d, w, {"R0", "phi_s", "phi_w", "U", "theta_hat_deg"});
    DirectInputs in;
    in.R0 = scalar(required(d, w, "R0"), join(w, "R0"));
    if (d.contains("phi_s")) in.phi_s = scalar(d["phi_s"], join(w, "phi_s"));
    if (d.contains("phi_w")) in.phi_w = scalar(d["phi_w"], join(w, "phi_w"));
    if (d.contains("U")) in.U = wind(d["U"], join(w, "U"));
    if (d.contains("theta_hat_deg"))
      in.theta_hat = scaled(scalar(d["theta_hat_deg"], join(w, "theta_hat_deg")), std::numbers::pi / 180.0);
    spec.source = in;
  } else {
    FuelInputs in;
    in.fuel = fuel_bed(j["fuel"], join(where, "fuel"));
    if (j.contains("env")) in.env = environment(j["env"], join(where, "env"));
    spec.source = in;
  }
  return spec;
}

inline Stage stage(const json& j, const std::string& where) {
  check_keys(j, where, {"duration", "method", "dt", "untangle", "n_sphere", "h", "model"});
  Stage s;
  s.duration = duration(required(j, where, "duration"), join(where, "duration"));
  if (j.contains("method")) {
    const auto& m = j["method"];
    if (m == "rays") s.method = Method::kRays;
    else if (m == "huygens") s.method = Method::kHuygens;
    else throw InvalidInput(join(where, "method"), "must be 'rays' or 'huygens'");
  }
  if (j.contains("dt")) s.dt = duration(j["dt"], join(where, "dt"));
  if (j.contains("untangle")) {
    if (!j["untangle"].is_boolean()) throw InvalidInput(join(where, "untangle"), "must be true or false");
    s.untangle = j["untangle"].get<bool>();
  }
  if (j.contains("n_sphere")) {
    if (!j["n_sphere"].is_number_integer()) throw InvalidInput(join(where, "n_sphere"), "must be an integer");
    s.n_sphere = j["n_sphere"].get<int>();
  }
  if (j.contains("h")) s.h = number(j["h"], join(where, "h"));
  s.model = model(required(j, where, "model"), join(where, "model"));
  return s;
}

inline OutputPaths outputs(const json& j, const std::string& where) {
  check_keys(j, where, {"fronts_csv", "rays_csv", "svg", "report"});
  OutputPaths o;
  auto str = [&](const char* key, std::string& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_string() || j[key].get<std::string>().empty())
      throw InvalidInput(join(where, key), "must be a non-empty path");
    dst = j[key].get<std::string>();
  };
  str("fronts_csv", o.fronts_csv);
  str("rays_csv", o.rays_csv);
  str("svg", o.svg);
  str("report", o.report);
  return o;
}

}  // namespace detail

/// Parses a scenario document. Relative CSV paths resolve against `base_dir`.
inline ScenarioFile parse_scenario(std::string_view text,
                                   const std::filesystem::path& base_dir = {}) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw InvalidInput("scenario", std::string("malformed document: ") + e.what());
  }
  detail::check_keys(doc, "", {"schema_version", "length_unit", "initial", "resolution", "stages", "outputs"});
  ScenarioFile out;
  const auto& version = detail::required(doc, "", "schema_version");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
    throw InvalidInput("schema_version", "must be " + std::to_string(kSchemaVersion));
  out.schema_version = version.get<int>();

  Scenario& s = out.scenario;
  if (doc.contains("length_unit")) {
    if (!doc["length_unit"].is_string()) throw InvalidInput("length_unit", "must be a string");
    s.length_unit = units::parse_length(doc["length_unit"].get<std::string>());
  }
  const auto& init = detail::required(doc, "", "initial");
  detail::check_keys(init, "initial", {"point", "vertices", "csv"});
  if (init.size() != 1) throw InvalidInput("initial", "needs exactly one of point, vertices, csv");
  if (init.contains("point")) {
    s.initial = detail::point(init["point"], "initial.point");
  } else if (init.contains("vertices")) {
    s.initial = detail::front(init["vertices"], "initial.vertices");
  } else {
    if (!init["csv"].is_string()) throw InvalidInput("initial.csv", "must be a path");
    std::filesystem::path p = init["csv"].get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    s.initial = detail::read_front_csv(p, "initial.csv");
  }
  if (doc.contains("resolution")) {
    s.resolution = detail::number(doc["resolution"], "resolution");
    if (!(s.resolution > 0.0)) throw InvalidInput("resolution", "must be positive");
  }
  const auto& stages = detail::required(doc, "", "stages");
  if (!stages.is_array()) throw InvalidInput("stages", "must be an array");
  for (std::size_t i = 0; i < stages.size(); ++i)
    s.stages.push_back(detail::stage(stages[i], "stages[" + std::to_string(i) + "]"));
  if (doc.contains("outputs")) out.outputs = detail::outputs(doc["outputs"], "outputs");
  validate(s);
  return out;
}

inline ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("scenario", "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path());
}

}  // namespace wildfire::io
