#pragma once

// Serialization of scenario results: fronts and rays CSV, an SVG plot and a
// JSON run report. Numbers go through snprintf so output is byte-stable.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wildfire/geometry.hpp"
#include "wildfire/propagation.hpp"

namespace wildfire::io {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline constexpr const char* kFrontsHeader = "stage,t,vertex_index,x,y";
inline constexpr const char* kRaysHeader = "ray_id,t,x,y,v1,v2";

inline void write_fronts_csv(std::ostream& os, const std::vector<TimedFront>& fronts) {
  os << kFrontsHeader << '\n';
  for (const TimedFront& f : fronts) {
    for (std::size_t i = 0; i < f.front.size(); ++i) {
      os << f.stage << ',' << format_number(f.t) << ',' << i << ',' << format_number(f.front[i].x)
         << ',' << format_number(f.front[i].y) << '\n';
    }
  }
}

/// Times are hours since the start of the scenario.
inline void write_rays_csv(std::ostream& os, const std::vector<RayRecord>& rays) {
  os << kRaysHeader << '\n';
  for (const RayRecord& r : rays) {
    for (const RaySample& s : r.trajectory.samples) {
      os << r.id << ',' << format_number(r.t0 + s.t) << ',' << format_number(s.x) << ','
         << format_number(s.y) << ',' << format_number(s.v1) << ',' << format_number(s.v2) << '\n';
    }
  }
}

namespace detail {

/// Blue (early) to red (late).
inline std::string time_color(double u) {
  u = std::clamp(u, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(40 + 200 * u));
  const int g = static_cast<int>(std::lround(60 + 60 * (1.0 - std::abs(2.0 * u - 1.0))));
  const int b = static_cast<int>(std::lround(220 - 190 * u));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace detail

/// Fronts as closed paths colored by time; rays as thin grey polylines.
/// The plane's +y axis points up in the drawing.
inline void write_svg(std::ostream& os, const ScenarioResult& result, double width_px = 800.0) {
  BoundingBox box;
  for (const auto& f : result.fronts)
    for (const Point& p : f.front.points) box.add(p);
  for (const auto& r : result.rays)
    for (const auto& s : r.trajectory.samples) box.add(s.point());
  if (!(box.xmax >= box.xmin)) box = BoundingBox{-1.0, -1.0, 1.0, 1.0};
  const double span = std::max({box.xmax - box.xmin, box.ymax - box.ymin, 1e-9});
  const double margin = 0.05 * span;
  const double w = box.xmax - box.xmin + 2 * margin;
  const double h = box.ymax - box.ymin + 2 * margin;
  const double scale = width_px / w;
  auto X = [&](double x) { return format_number((x - box.xmin + margin) * scale); };
  auto Y = [&](double y) { return format_number((box.ymax + margin - y) * scale); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_number(width_px)
     << "\" height=\"" << format_number(h * scale) << "\" viewBox=\"0 0 " << format_number(width_px)
     << ' ' << format_number(h * scale) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g fill=\"none\" stroke=\"#999999\" stroke-width=\"0.4\">\n";
  for (const auto& r : result.rays) {
    if (r.trajectory.samples.size() < 2) continue;
    os << "<polyline points=\"";
    for (std::size_t i = 0; i < r.trajectory.samples.size(); ++i) {
      const auto& s = r.trajectory.samples[i];
      os << (i ? " " : "") << X(s.x) << ',' << Y(s.y);
    }
    os << "\"/>\n";
  }
  os << "</g>\n<g fill=\"none\" stroke-width=\"1.2\">\n";
  double t_max = 0.0;
  for (const auto& f : result.fronts) t_max = std::max(t_max, f.t);
  for (const auto& f : result.fronts) {
    if (f.front.empty()) continue;
    os << "<path stroke=\"" << detail::time_color(t_max > 0 ? f.t / t_max : 1.0) << "\" d=\"";
    for (std::size_t i = 0; i < f.front.size(); ++i)
      os << (i ? " L" : "M") << X(f.front[i].x) << ',' << Y(f.front[i].y);
    os << " Z\"><title>stage " << f.stage << ", t = " << format_number(f.t) << " h</title></path>\n";
  }
  os << "</g>\n</svg>\n";
}

inline nlohmann::ordered_json validity_json(const ValidityReport& r) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& c : r.conditions) {
    out.push_back({{"condition", c.name}, {"satisfied", c.satisfied}, {"lhs", c.lhs}, {"rhs", c.rhs}});
  }
  return out;
}

/// Run report: status, per-stage validity and counts, and front areas.
inline nlohmann::ordered_json report_json(const ScenarioResult& result,
                                          const std::vector<std::string>& written = {}) {
  nlohmann::ordered_json j;
  j["status"] = result.completed() ? "completed" : "model_violation";
  j["partial"] = !result.completed();
  if (!result.completed()) j["failure"] = result.failure;
  j["resolution"] = result.resolution;
  auto stages = nlohmann::ordered_json::array();
  for (const StageReport& s : result.stages) {
    nlohmann::ordered_json js;
    js["stage"] = s.index;
    js["method"] = s.method;
    js["model"] = s.model;
    js["start_h"] = s.start;
    js["duration_h"] = s.duration;
    js["valid"] = s.valid;
    js["validity"] = validity_json(s.validity);
    js["untangle"] = s.untangle;
    js["rays"] = s.rays;
    js["ray_failures"] = s.ray_failures;
    js["huygens_steps"] = s.huygens_steps;
    js["completed"] = s.completed;
    if (!s.error.empty()) js["error"] = s.error;
    stages.push_back(std::move(js));
  }
  j["stages"] = std::move(stages);
  auto fronts = nlohmann::ordered_json::array();
  for (const TimedFront& f : result.fronts) {
    fronts.push_back({{"stage", f.stage},
                      {"t_h", f.t},
                      {"vertices", f.front.size()},
                      {"area", f.area},
                      {"self_intersections", f.self_intersections}});
  }
  j["fronts"] = std::move(fronts);
  j["outputs"] = written;
  return j;
}

}  // namespace wildfire::io
