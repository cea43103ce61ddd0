#pragma once

// Fire-front propagation: rays (geodesics orthogonal to the front) and
// Huygens steps (union of small spherical fronts), plus staged scenarios.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/polygon/polygon.hpp>

#include "wildfire/error.hpp"
#include "wildfire/fieldexpr.hpp"
#include "wildfire/finsler.hpp"
#include "wildfire/geodesics.hpp"
#include "wildfire/geometry.hpp"
#include "wildfire/rothermel.hpp"
#include "wildfire/units.hpp"
#include "wildfire/vec.hpp"

namespace wildfire {

inline constexpr int kMinSphereSamples = 16;
inline constexpr int kMinPointSourceRays = 64;

/// Front reached at time T from the point p: p + T v(theta_i) for Models 1/2,
/// geodesic endpoints for Models 3/4. n uniform angles, counterclockwise.
inline FrontPolyline spherical_front(const MetricModel& model, Point p, double T, int n,
                                     double h = kDefaultGeodesicStep) {
  if (n < kMinSphereSamples) throw InvalidInput("n", "spherical front needs at least 16 samples");
  if (!(T > 0.0)) throw InvalidInput("T", "duration must be positive");
  require_valid(model, p);
  FrontPolyline f;
  f.points.reserve(static_cast<std::size_t>(n));
  const LocalMetric<double> m = model.at(p);
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / n;
    if (model.position_independent()) {
      f.points.push_back(p + T * unit_vector_at_angle(m, theta));
    } else {
      f.points.push_back(exponential_front_point(model, p, theta, T, std::min(h, T)));
    }
  }
  return f;
}

/// Outward Euclidean normal of a counterclockwise front at vertex i, from
/// the central-difference tangent.
inline TangentVector front_tangent(const FrontPolyline& f, std::size_t i) {
  const std::size_t n = f.size();
  const Point& next = f[(i + 1) % n];
  const Point& prev = f[(i + n - 1) % n];
  return next - prev;
}

/// Per-vertex outward unit vectors orthogonal (in the metric) to the front.
/// Of the orthogonal roots, the one with the largest Euclidean component
/// along the outward normal is chosen; that is the support point of the
/// indicatrix in the normal direction.
inline std::vector<TangentVector> front_normals(
    const MetricModel& model, const FrontPolyline& front,
    OrthogonalityRule rule = OrthogonalityRule::kFundamentalForm) {
  if (!front.closed || front.size() < 3) throw GeometryError("front_normals needs a closed front");
  std::vector<TangentVector> out(front.size());
  for (std::size_t i = 0; i < front.size(); ++i) {
    const TangentVector u = front_tangent(front, i);
    const TangentVector normal{u.v2, -u.v1};
    try {
      const auto roots = orthogonal_directions(model, front[i], u, rule);
      double best = 0.0;
      bool found = false;
      for (const auto& r : roots) {
        const double d = dot(r.v, normal);
        if (d > best) {
          best = d;
          out[i] = r.v;
          found = true;
        }
      }
      if (!found) throw NoOrthogonalDirection("no orthogonal unit vector points outward");
    } catch (const NoOrthogonalDirection& e) {
      throw NoOrthogonalDirection("vertex " + std::to_string(i) + ": " + e.what());
    } catch (const InvalidInput& e) {
      throw GeometryError("vertex " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rays

struct RayFailure {
  std::size_t vertex = 0;
  std::string reason;
  bool model_violation = false;
};

struct RayPropagation {
  std::vector<double> times;
  std::vector<FrontPolyline> fronts;  // raw ray positions in vertex order, one per time
  std::vector<RayTrajectory> rays;    // one per seed vertex (failed seeds have one sample)
  std::vector<RayFailure> failures;
};

struct RayOptions {
  double h = kDefaultGeodesicStep;
  double min_success = 0.8;
  OrthogonalityRule rule = OrthogonalityRule::kFundamentalForm;
  double max_gap = 0.0;  // 0 keeps exactly one ray per seed
  std::size_t max_rays = 50000;
};

namespace detail {

inline std::vector<double> output_schedule(double T, std::vector<double> times) {
  std::vector<double> out;
  for (double t : times)
    if (t > 0.0 && t < T) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.push_back(T);
  return out;
}

inline RayTrajectory trace_ray(const MetricModel& model, Point p, TangentVector v,
                               const std::vector<double>& schedule, const RayOptions& opt) {
  const double T = schedule.back();
  if (model.position_independent()) {
    RayTrajectory r;
    r.model_tag = model.kind();
    r.samples.push_back({0.0, p.x, p.y, v.v1, v.v2});
    for (double t : schedule) r.samples.push_back({t, p.x + t * v.v1, p.y + t * v.v2, v.v1, v.v2});
    return r;
  }
  IntegratorOptions io;
  io.record_every_step = false;
  io.checkpoints = schedule;
  return integrate_geodesic(model, p, v, T, opt.h, io);
}

/// Initial point and velocity of the ray at seed parameter s. A missing
/// velocity marks a seed that failed before integration.
struct Seed {
  Point p;
  std::optional<TangentVector> v;
  std::string reason;
  bool model_violation = false;
};

struct TracedRay {
  double s = 0.0;
  RayTrajectory ray;
  bool failed = false;
  std::string reason;
  bool model_violation = false;
};

inline TracedRay trace_seed(const MetricModel& model, double s, const Seed& seed,
                            const std::vector<double>& schedule, const RayOptions& opt) {
  TracedRay out;
  out.s = s;
  auto stub = [&](std::string reason, bool violation) {
    out.ray.model_tag = model.kind();
    out.ray.truncated = true;
    const TangentVector v = seed.v.value_or(TangentVector{});
    out.ray.samples = {{0.0, seed.p.x, seed.p.y, v.v1, v.v2}};
    out.failed = true;
    out.reason = std::move(reason);
    out.model_violation = violation;
  };
  if (!seed.v) {
    stub(seed.reason, seed.model_violation);
    return out;
  }
  try {
    out.ray = trace_ray(model, seed.p, *seed.v, schedule, opt);
    if (out.ray.truncated) {
      out.failed = true;
      out.reason = out.ray.violation;
      out.model_violation = true;
    }
  } catch (const ModelInvalid& e) {
    stub(e.what(), true);
  } catch (const IntegrationError& e) {
    stub(e.what(), false);
  }
  return out;
}

/// Largest distance between two rays over the output times both reached.
inline double ray_separation(const TracedRay& a, const TracedRay& b) {
  const std::size_t k = std::min(a.ray.samples.size(), b.ray.samples.size());
  double d = 0.0;
  for (std::size_t i = 1; i < k; ++i) d = std::max(d, distance(a.ray.samples[i].point(), b.ray.samples[i].point()));
  return d;
}

/// Traces seeds 0..n-1, then (when opt.max_gap > 0) bisects the seed
/// parameter between neighbouring rays that drift further apart than
/// max_gap. Seed parameters are cyclic with period n; ray order follows s.
inline RayPropagation assemble_rays(const MetricModel& model, std::size_t n,
                                    const std::function<Seed(double)>& seed_at,
                                    const std::vector<double>& schedule, const RayOptions& opt) {
  std::vector<TracedRay> rays;
  rays.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i);
    rays.push_back(trace_seed(model, s, seed_at(s), schedule, opt));
  }

  const double period = static_cast<double>(n);
  while (opt.max_gap > 0.0 && rays.size() < opt.max_rays) {
    std::vector<std::size_t> split;
    std::vector<double> mids;
    for (std::size_t i = 0; i < rays.size(); ++i) {
      const TracedRay& a = rays[i];
      const TracedRay& b = rays[(i + 1) % rays.size()];
      const double sb = i + 1 == rays.size() ? b.s + period : b.s;
      if (a.failed || b.failed || sb - a.s < 1e-9) continue;
      if (ray_separation(a, b) <= opt.max_gap) continue;
      split.push_back(i);
      mids.push_back(std::fmod(0.5 * (a.s + sb), period));
      if (rays.size() + split.size() >= opt.max_rays) break;
    }
    if (split.empty()) break;
    std::vector<TracedRay> next;
    next.reserve(rays.size() + split.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < rays.size(); ++i) {
      next.push_back(std::move(rays[i]));
      if (j < split.size() && split[j] == i) {
        next.push_back(trace_seed(model, mids[j], seed_at(mids[j]), schedule, opt));
        ++j;
      }
    }
    rays = std::move(next);
  }

  RayPropagation out;
  out.times = schedule;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (rays[i].failed) out.failures.push_back({i, rays[i].reason, rays[i].model_violation});
    out.rays.push_back(std::move(rays[i].ray));
  }

  const double ok = static_cast<double>(out.rays.size() - out.failures.size());
  if (ok < opt.min_success * static_cast<double>(out.rays.size())) {
    std::ostringstream os;
    os << out.failures.size() << " of " << out.rays.size() << " rays failed";
    if (!out.failures.empty())
      os << "; first at vertex " << out.failures.front().vertex << ": " << out.failures.front().reason;
    const bool violation = std::any_of(out.failures.begin(), out.failures.end(),
                                       [](const RayFailure& f) { return f.model_violation; });
    if (violation) throw ModelInvalid(os.str());
    throw IntegrationError(os.str());
  }

  for (std::size_t k = 0; k < schedule.size(); ++k) {
    FrontPolyline f;
    for (const RayTrajectory& r : out.rays) {
      // samples[0] is t = 0; samples[k + 1] is schedule[k] when present.
      if (r.samples.size() > k + 1) f.points.push_back(r.samples[k + 1].point());
    }
    out.fronts.push_back(remove_duplicate_points(f));
  }
  return out;
}

}  // namespace detail

/// Traces the outward orthogonal geodesic from every front vertex up to T.
/// Fronts at each output time keep the vertex order; rays that fail are
/// dropped from the fronts and listed in `failures`. With opt.max_gap set,
/// extra rays start from points between vertices where neighbours diverge.
inline RayPropagation propagate_rays(const MetricModel& model, const FrontPolyline& front,
                                     double T, const std::vector<double>& output_times,
                                     const RayOptions& opt = {}) {
  if (!(T > 0.0)) throw InvalidInput("T", "duration must be positive");
  validate_front(front);
  const auto schedule = detail::output_schedule(T, output_times);
  const std::size_t n = front.size();
  auto seed_at = [&](double s) {
    const auto i = static_cast<std::size_t>(s);
    const double frac = s - static_cast<double>(i);
    const Point a = front[i];
    const Point b = front[(i + 1) % n];
    detail::Seed seed;
    seed.p = frac == 0.0 ? a : a + frac * (b - a);
    const TangentVector u = frac == 0.0 ? front_tangent(front, i) : b - a;
    const TangentVector normal{u.v2, -u.v1};
    try {
      double best_dot = 0.0;
      for (const auto& r : orthogonal_directions(model, seed.p, u, opt.rule)) {
        const double d = dot(r.v, normal);
        if (d > best_dot) {
          best_dot = d;
          seed.v = r.v;
        }
      }
      if (!seed.v) seed.reason = "no orthogonal unit vector points outward";
    } catch (const ModelInvalid& e) {
      seed.reason = e.what();
      seed.model_violation = true;
    } catch (const NoOrthogonalDirection& e) {
      seed.reason = e.what();
    }
    return seed;
  };
  return detail::assemble_rays(model, n, seed_at, schedule, opt);
}

/// Rays leaving a single ignition point at n uniform angles with unit
/// velocities v(theta) on the indicatrix.
inline RayPropagation propagate_point_rays(const MetricModel& model, Point p, double T, int n,
                                           const std::vector<double>& output_times,
                                           const RayOptions& opt = {}) {
  if (!(T > 0.0)) throw InvalidInput("T", "duration must be positive");
  if (n < kMinSphereSamples) throw InvalidInput("n", "need at least 16 rays");
  require_valid(model, p);
  const auto schedule = detail::output_schedule(T, output_times);
  const LocalMetric<double> m = model.at(p);
  auto seed_at = [&](double s) {
    return detail::Seed{p, unit_vector_at_angle(m, 2.0 * std::numbers::pi * s / n), {}, false};
  };
  return detail::assemble_rays(model, static_cast<std::size_t>(n), seed_at, schedule, opt);
}

// ---------------------------------------------------------------------------
// Huygens steps

/// Largest indicatrix speed over the front's vertices, sampled at `samples`
/// directions with the metric frozen at each vertex. This is the speed the
/// Huygens step-size bound refers to.
inline double max_front_speed(const MetricModel& model, const FrontPolyline& front,
                              int samples = 64) {
  double best = 0.0;
  for (const Point& p : front.points) {
    const LocalMetric<double> m = model.at(p);
    for (int k = 0; k < samples; ++k)
      best = std::max(best, indicatrix_speed(m, 2.0 * std::numbers::pi * k / samples));
  }
  return best;
}

namespace detail {

namespace bp = boost::polygon;
using IPoint = bp::point_data<int>;
using IPolygon = bp::polygon_data<int>;
using IPolygonWithHoles = bp::polygon_with_holes_data<int>;

/// Affine map to the integer lattice used by the polygon union.
struct Lattice {
  double cx = 0.0;
  double cy = 0.0;
  double scale = 1.0;

  IPoint to(Point p) const {
    return {static_cast<int>(std::llround((p.x - cx) * scale)),
            static_cast<int>(std::llround((p.y - cy) * scale))};
  }
  Point from(const IPoint& q) const {
    return {cx + bp::x(q) / scale, cy + bp::y(q) / scale};
  }
};

inline Lattice make_lattice(const BoundingBox& box, double resolution) {
  Lattice L;
  L.cx = 0.5 * (box.xmin + box.xmax);
  L.cy = 0.5 * (box.ymin + box.ymax);
  const double half = 0.5 * std::max(box.xmax - box.xmin, box.ymax - box.ymin);
  L.scale = 1e4 / resolution;
  constexpr double kMaxCoordinate = static_cast<double>(1 << 28);
  if (half > 0.0) L.scale = std::min(L.scale, kMaxCoordinate / half);
  return L;
}

inline IPolygon to_lattice(const std::vector<Point>& pts, const Lattice& L) {
  std::vector<IPoint> q;
  q.reserve(pts.size());
  for (const Point& p : pts) {
    const IPoint ip = L.to(p);
    if (q.empty() || q.back() != ip) q.push_back(ip);
  }
  while (q.size() > 1 && q.front() == q.back()) q.pop_back();
  IPolygon poly;
  poly.set(q.begin(), q.end());
  return poly;
}

/// Convex hull (counterclockwise, monotone chain).
inline std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Point& a, const Point& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> h(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && orient(h[k - 2], h[k - 1], p) <= 0.0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && orient(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace detail

/// One Huygens step: the outer boundary of the old burned region united with
/// the spherical fronts of duration dt around every vertex (and the hulls of
/// consecutive spheres, which fill the gaps between vertices), resampled to
/// `resolution`. Requires dt * (max speed) <= 5 * resolution.
///
/// Sphere geodesics for Models 3/4 use `geodesic_step` (0 means one RK4 step
/// of size dt).
inline FrontPolyline huygens_step(const MetricModel& model, const FrontPolyline& front, double dt,
                                  int n_sphere, double resolution, double geodesic_step = 0.0) {
  if (!(dt > 0.0)) throw InvalidInput("dt", "must be positive");
  if (!(resolution > 0.0)) throw InvalidInput("resolution", "must be positive");
  if (n_sphere < kMinSphereSamples) throw InvalidInput("n_sphere", "must be at least 16");
  validate_front(front);
  const double h = geodesic_step > 0.0 ? geodesic_step : dt;

  const double max_speed = max_front_speed(model, front);
  if (dt * max_speed > 5.0 * resolution * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "dt * max speed = " << dt * max_speed << " exceeds 5 * resolution = " << 5.0 * resolution;
    throw InvalidInput("dt", os.str());
  }
  std::vector<std::vector<Point>> spheres(front.size());
  for (std::size_t i = 0; i < front.size(); ++i) {
    const FrontPolyline s = spherical_front(model, front[i], dt, n_sphere, h);
    if (!(signed_area(s) > 0.0)) {
      throw GeometryError("degenerate spherical front at vertex " + std::to_string(i));
    }
    spheres[i] = s.points;
  }

  BoundingBox box = bounding_box(front.points);
  for (const auto& s : spheres)
    for (const Point& q : s) box.add(q);
  const detail::Lattice L = detail::make_lattice(box, resolution);

  namespace bp = boost::polygon;
  bp::polygon_set_data<int> region;
  region.insert(detail::to_lattice(front.points, L));
  for (std::size_t i = 0; i < front.size(); ++i) {
    const std::size_t j = (i + 1) % front.size();
    std::vector<Point> pair = spheres[i];
    pair.insert(pair.end(), spheres[j].begin(), spheres[j].end());
    const auto hull = detail::convex_hull(std::move(pair));
    if (hull.size() < 3) throw GeometryError("degenerate sphere hull at vertex " + std::to_string(i));
    region.insert(detail::to_lattice(hull, L));
  }
  std::vector<detail::IPolygonWithHoles> parts;
  region.get(parts);
  if (parts.empty()) throw GeometryError("polygon union is empty");

  const detail::IPolygonWithHoles* largest = nullptr;
  double largest_area = -1.0;
  for (const auto& part : parts) {
    const double a = std::abs(static_cast<double>(bp::area(part)));
    if (a > largest_area) {
      largest_area = a;
      largest = &part;
    }
  }
  FrontPolyline out;
  for (auto it = largest->begin(); it != largest->end(); ++it) out.points.push_back(L.from(*it));
  out = remove_duplicate_points(out);
  if (out.size() < 3) throw GeometryError("polygon union produced a degenerate boundary");
  if (signed_area(out) < 0.0) std::reverse(out.points.begin(), out.points.end());
  // Start from the vertex nearest the old first vertex so fronts stay aligned.
  std::size_t start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = distance(out[i], front[0]);
    if (d < best) {
      best = d;
      start = i;
    }
  }
  std::rotate(out.points.begin(), out.points.begin() + static_cast<std::ptrdiff_t>(start),
              out.points.end());
  const double L_out = perimeter(out);
  return resample(out, std::min(resolution, L_out / kMinPointSourceRays));
}

// ---------------------------------------------------------------------------
// Scenarios

enum class Method { kRays, kHuygens };

inline const char* method_name(Method m) { return m == Method::kRays ? "rays" : "huygens"; }

/// Spread inputs given directly. Rates are in plane units per hour, U in
/// ft/min (it enters only through 1 + 0.25 U), theta_hat in radians.
struct DirectInputs {
  field::ScalarField R0 = 0.0;
  field::ScalarField phi_s = 0.0;
  field::ScalarField phi_w = 0.0;
  field::ScalarField U = 0.0;
  field::ScalarField theta_hat = 0.0;
};

struct FuelInputs {
  rothermel::FuelBed fuel;
  rothermel::Environment env;
};

struct ModelSpec {
  std::variant<DirectInputs, FuelInputs> source;
};

/// Builds the metric for a stage. Wind is present exactly when U is not the
/// constant 0; constant inputs give Models 1/2, field inputs Models 3/4.
/// Fuel-chain rates (ft/min) are converted to `length` units per hour.
inline MetricModel build_model(const ModelSpec& spec, units::Length length,
                               rothermel::RothermelVariant variant =
                                   rothermel::RothermelVariant::kDefault) {
  if (const auto* fuel = std::get_if<FuelInputs>(&spec.source)) {
    const auto p = rothermel::spread_params(fuel->fuel, fuel->env, variant);
    const double k = units::ft_per_min_to_plane_per_hour(length);
    if (fuel->env.U == 0.0) return MetricModel::model1(p.R0 * k, p.phi_s);
    return MetricModel::model2(p.a * k, p.b * k, p.c * k, p.theta_hat, p.U);
  }
  const auto& d = std::get<DirectInputs>(spec.source);
  const bool windless = d.U.constant_value() && *d.U.constant_value() == 0.0;
  if (windless) {
    if (d.R0.is_constant() && d.phi_s.is_constant())
      return MetricModel::model1(*d.R0.constant_value(), *d.phi_s.constant_value());
    return MetricModel::model3(d.R0, d.phi_s);
  }
  if (d.R0.is_constant() && d.phi_s.is_constant() && d.phi_w.is_constant() && d.U.is_constant() &&
      d.theta_hat.is_constant()) {
    const auto p = rothermel::frame_from_rates(*d.R0.constant_value(), *d.phi_s.constant_value(),
                                               *d.phi_w.constant_value(), *d.U.constant_value(),
                                               *d.theta_hat.constant_value());
    return MetricModel::model2(p.a, p.b, p.c, p.theta_hat, p.U);
  }
  auto expr = [](const field::ScalarField& f, const char* name) {
    auto e = f.as_expr();
    if (!e) throw InvalidInput(name, "grid fields cannot be combined into frame parameters");
    return *e;
  };
  using field::Expr;
  const Expr R0 = expr(d.R0, "R0");
  const Expr U = expr(d.U, "U");
  const Expr R_H = R0 * (1.0 + expr(d.phi_w, "phi_w") + expr(d.phi_s, "phi_s"));
  const Expr z = 1.0 + 0.25 * U;
  const Expr e = call(field::Function::kSqrt, z * z - 1.0) / z;
  const Expr R_B = R_H * (1.0 - e) / (1.0 + e);
  return MetricModel::model4(z / (2.0 * (R_B + R_H)), 0.5 * (R_B + R_H), 0.5 * (R_H - R_B),
                             d.theta_hat, d.U);
}

struct Stage {
  double duration = 0.0;  // hours
  ModelSpec model;
  Method method = Method::kRays;
  double dt = 0.0;        // Huygens step and output cadence, hours; 0 means duration / 10
  bool untangle = true;
  int n_sphere = 32;
  double h = kDefaultGeodesicStep;
};

struct Scenario {
  std::variant<Point, FrontPolyline> initial = Point{};
  std::vector<Stage> stages;
  double resolution = 0.0;  // 0 selects the default
  units::Length length_unit = units::Length::kKilometer;
};

struct RunOptions {
  rothermel::RothermelVariant variant = rothermel::RothermelVariant::kDefault;
  std::optional<bool> untangle;  // overrides every stage when set
};

struct TimedFront {
  int stage = 0;
  double t = 0.0;  // hours since the start of the scenario
  FrontPolyline front;
  double area = 0.0;
  std::size_t self_intersections = 0;
};

struct RayRecord {
  std::size_t id = 0;
  int stage = 0;
  double t0 = 0.0;
  RayTrajectory trajectory;
};

struct StageReport {
  int index = 0;
  std::string method;
  std::string model;
  double start = 0.0;
  double duration = 0.0;
  ValidityReport validity;
  bool valid = true;
  bool untangle = true;
  std::size_t rays = 0;
  std::size_t ray_failures = 0;
  std::size_t huygens_steps = 0;
  bool completed = false;
  std::string error;
};

enum class RunStatus { kCompleted, kModelViolation };

struct ScenarioResult {
  std::vector<TimedFront> fronts;
  std::vector<RayRecord> rays;
  std::vector<StageReport> stages;
  double resolution = 0.0;
  RunStatus status = RunStatus::kCompleted;
  std::string failure;

  bool completed() const { return status == RunStatus::kCompleted; }
};

inline void validate(const Scenario& s) {
  if (s.stages.empty()) throw InvalidInput("stages", "at least one stage is required");
  if (s.resolution < 0.0 || !std::isfinite(s.resolution))
    throw InvalidInput("resolution", "must be positive");
  for (std::size_t i = 0; i < s.stages.size(); ++i) {
    const Stage& st = s.stages[i];
    const std::string where = "stages[" + std::to_string(i) + "].";
    if (!(st.duration > 0.0) || !std::isfinite(st.duration))
      throw InvalidInput(where + "duration", "must be positive");
    if (st.dt < 0.0 || !std::isfinite(st.dt)) throw InvalidInput(where + "dt", "must be positive");
    if (!(st.h > 0.0)) throw InvalidInput(where + "h", "must be positive");
    if (st.n_sphere < kMinSphereSamples) throw InvalidInput(where + "n_sphere", "must be at least 16");
  }
  if (const auto* f = std::get_if<FrontPolyline>(&s.initial)) {
    try {
      validate_front(*f);
    } catch (const GeometryError& e) {
      throw InvalidInput("initial", e.what());
    }
  }
}

namespace detail {

inline double default_resolution(const Scenario& s, const MetricModel& first) {
  if (const auto* f = std::get_if<FrontPolyline>(&s.initial))
    return bounding_box(f->points).diagonal() / 200.0;
  const Point p = std::get<Point>(s.initial);
  FrontPolyline frozen;
  const LocalMetric<double> m = first.at(p);
  for (int k = 0; k < 64; ++k)
    frozen.points.push_back(p + s.stages.front().duration * unit_vector_at_angle(m, 2.0 * std::numbers::pi * k / 64));
  return bounding_box(frozen.points).diagonal() / 200.0;
}

inline ValidityReport stage_validity(const MetricModel& model, const std::vector<Point>& pts) {
  for (const Point& p : pts) {
    ValidityReport r = model.validity_at(p);
    if (!r.ok()) return r;
  }
  return model.validity_at(pts.front());
}

inline std::vector<double> cadence(double duration, double dt) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::ceil(duration / dt - 1e-9));
  for (long k = 1; k < n; ++k) out.push_back(static_cast<double>(k) * dt);
  out.push_back(duration);
  return out;
}

}  // namespace detail

/// Runs every stage in order, handing the final (untangled, resampled) front
/// of one stage to the next. Model violations stop the run; the result then
/// carries everything produced so far and status kModelViolation.
inline ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options = {}) {
  validate(scenario);
  ScenarioResult result;

  std::optional<Point> point_source;
  FrontPolyline front;
  if (const auto* p = std::get_if<Point>(&scenario.initial)) point_source = *p;
  else front = std::get<FrontPolyline>(scenario.initial);

  double t_start = 0.0;
  std::size_t next_ray_id = 0;

  auto record = [&](int stage, double t, FrontPolyline f) {
    TimedFront tf;
    tf.stage = stage;
    tf.t = t;
    tf.area = signed_area(f);
    tf.self_intersections = self_intersections(f).size();
    tf.front = std::move(f);
    result.fronts.push_back(std::move(tf));
  };

  for (std::size_t si = 0; si < scenario.stages.size(); ++si) {
    const Stage& stage = scenario.stages[si];
    const int stage_no = static_cast<int>(si + 1);
    StageReport rep;
    rep.index = stage_no;
    rep.method = method_name(stage.method);
    rep.start = t_start;
    rep.duration = stage.duration;
    rep.untangle = options.untangle.value_or(stage.untangle);

    try {
      std::optional<MetricModel> built;
      try {
        built = build_model(stage.model, scenario.length_unit, options.variant);
      } catch (const ModelInvalid& e) {
        rep.valid = false;
        ValidityReport vr;
        vr.conditions.push_back({e.what(), false, 0.0, 0.0});
        rep.validity = vr;
        throw;
      }
      const MetricModel& model = *built;
      rep.model = model.describe();
      rep.validity = detail::stage_validity(
          model, point_source ? std::vector<Point>{*point_source} : front.points);
      rep.valid = rep.validity.ok();
      if (!rep.valid) throw ModelInvalid("stage " + std::to_string(stage_no) + ": " + rep.validity.summary());

      if (result.resolution == 0.0) {
        result.resolution = scenario.resolution > 0.0 ? scenario.resolution
                                                       : detail::default_resolution(scenario, model);
        if (!point_source) front = resample(front, std::min(result.resolution, perimeter(front) / kMinPointSourceRays));
      }
      const double res = result.resolution;
      const double dt = stage.dt > 0.0 ? std::min(stage.dt, stage.duration) : stage.duration / 10.0;
      const auto times = detail::cadence(stage.duration, dt);

      if (stage.method == Method::kRays) {
        RayOptions ro;
        ro.h = stage.h;
        ro.max_gap = 2.0 * res;
        // Ray samples five times per output interval.
        const auto sample_times = detail::cadence(stage.duration, dt / 5.0);
        RayPropagation rp;
        if (point_source) {
          FrontPolyline frozen;
          const LocalMetric<double> m = model.at(*point_source);
          for (int k = 0; k < 256; ++k)
            frozen.points.push_back(*point_source + stage.duration * unit_vector_at_angle(m, 2.0 * std::numbers::pi * k / 256));
          const double n_est = std::ceil(perimeter(frozen) / res);
          const int n = static_cast<int>(std::clamp(n_est, double(kMinPointSourceRays), 20000.0));
          rp = propagate_point_rays(model, *point_source, stage.duration, n, sample_times, ro);
        } else {
          rp = propagate_rays(model, front, stage.duration, sample_times, ro);
        }
        rep.rays = rp.rays.size();
        rep.ray_failures = rp.failures.size();
        for (auto& r : rp.rays) {
          RayRecord rr;
          rr.id = next_ray_id++;
          rr.stage = stage_no;
          rr.t0 = t_start;
          rr.trajectory = std::move(r);
          result.rays.push_back(std::move(rr));
        }
        std::size_t k = 0;
        for (double t : times) {
          while (k < rp.times.size() && rp.times[k] < t - 1e-9 * stage.duration) ++k;
          FrontPolyline f = rp.fronts[std::min(k, rp.fronts.size() - 1)];
          if (f.size() < 3) throw GeometryError("ray front collapsed");
          if (rep.untangle) f = untangle(f);
          record(stage_no, t_start + t, f);
        }
        front = rp.fronts.back();
      } else {
        double t = 0.0;
        if (point_source) {
          const double t0 = dt / 10.0;
          front = spherical_front(model, *point_source, t0, kMinPointSourceRays, std::min(stage.h, t0));
          t = t0;
        }
        for (double t_out : times) {
          // Substeps keep dt * speed within the Huygens bound as the front
          // reaches faster fuel.
          while (t < t_out - 1e-12 * stage.duration) {
            const double remaining = t_out - t;
            const double speed = max_front_speed(model, front);
            const double sub = std::max(1.0, std::ceil(remaining * speed * 1.25 / (5.0 * res)));
            const double step = remaining / sub;
            front = huygens_step(model, front, step, stage.n_sphere, res);
            ++rep.huygens_steps;
            t = sub == 1.0 ? t_out : t + step;
          }
          FrontPolyline f = front;
          if (rep.untangle && !is_simple(f)) f = untangle(f);
          record(stage_no, t_start + t_out, f);
        }
      }
      point_source.reset();
      front = untangle(front);
      front = resample(front, std::min(res, perimeter(front) / kMinPointSourceRays));
      rep.completed = true;
      result.stages.push_back(rep);
    } catch (const Error& e) {
      const bool is_validation = dynamic_cast<const InvalidInput*>(&e) != nullptr;
      if (is_validation) throw;
      rep.error = e.what();
      result.stages.push_back(rep);
      result.status = RunStatus::kModelViolation;
      result.failure = "stage " + std::to_string(stage_no) + ": " + e.what();
      return result;
    }
    t_start += stage.duration;
  }
  return result;
}

}  // namespace wildfire
