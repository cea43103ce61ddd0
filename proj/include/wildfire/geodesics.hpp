#pragma once

// Fire rays: unit-speed geodesics of x'' + 2 G(x, x') = 0.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "wildfire/error.hpp"
#include "wildfire/finsler.hpp"
#include "wildfire/vec.hpp"

namespace wildfire {

struct RaySample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;

  Point point() const { return {x, y}; }
  TangentVector velocity() const { return {v1, v2}; }
};

struct RayTrajectory {
  std::vector<RaySample> samples;
  ModelKind model_tag = ModelKind::kModel1;
  double max_drift = 0.0;      // max |F - 1| seen before renormalization
  int rejected_steps = 0;
  bool truncated = false;      // stopped early on a validity violation
  std::string violation;

  const RaySample& back() const { return samples.back(); }
  Point endpoint() const { return samples.back().point(); }
  double duration() const { return samples.back().t; }
};

inline constexpr double kDefaultGeodesicStep = 0.01;

struct IntegratorOptions {
  bool renormalize = true;
  double max_drift = 1e-3;  // reject a step whose |F - 1| exceeds this
  int max_halvings = 12;
  bool record_every_step = true;
  /// Times (in (0, T)) the integrator lands on exactly and always records.
  std::vector<double> checkpoints;
  SprayOptions spray;
};

/// p + t v sampled at t = 0, sample_dt, 2 sample_dt, ..., T.
inline RayTrajectory straight_ray(Point p, TangentVector v, double T, double sample_dt = 0.0,
                                  ModelKind tag = ModelKind::kModel1) {
  if (!(T >= 0.0)) throw InvalidInput("T", "duration must be non-negative");
  RayTrajectory r;
  r.model_tag = tag;
  auto push = [&](double t) { r.samples.push_back({t, p.x + t * v.v1, p.y + t * v.v2, v.v1, v.v2}); };
  push(0.0);
  if (T == 0.0) return r;
  if (sample_dt > 0.0) {
    const auto n = static_cast<long>(std::ceil(T / sample_dt - 1e-9));
    for (long k = 1; k < n; ++k) push(k * sample_dt);
  }
  push(T);
  return r;
}

namespace detail {

struct RayState {
  double x, y, v1, v2;
};

inline RayState ray_derivative(const MetricModel& model, const RayState& s,
                               const SprayOptions& opt) {
  const auto G = spray_coefficients(model, {s.x, s.y}, {s.v1, s.v2}, opt);
  return {s.v1, s.v2, -2.0 * G[0], -2.0 * G[1]};
}

inline RayState axpy(const RayState& s, double h, const RayState& k) {
  return {s.x + h * k.x, s.y + h * k.y, s.v1 + h * k.v1, s.v2 + h * k.v2};
}

inline RayState rk4_step(const MetricModel& model, const RayState& s, double h,
                         const SprayOptions& opt) {
  const RayState k1 = ray_derivative(model, s, opt);
  const RayState k2 = ray_derivative(model, axpy(s, 0.5 * h, k1), opt);
  const RayState k3 = ray_derivative(model, axpy(s, 0.5 * h, k2), opt);
  const RayState k4 = ray_derivative(model, axpy(s, h, k3), opt);
  return {s.x + h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
          s.y + h / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
          s.v1 + h / 6.0 * (k1.v1 + 2 * k2.v1 + 2 * k3.v1 + k4.v1),
          s.v2 + h / 6.0 * (k1.v2 + 2 * k2.v2 + 2 * k3.v2 + k4.v2)};
}

}  // namespace detail

/// Steps one geodesic with classical RK4. Each accepted step leaves F = 1
/// (when renormalizing); a step with |F - 1| > max_drift is retried as two
/// half steps.
class GeodesicIntegrator {
 public:
  GeodesicIntegrator(const MetricModel& model, IntegratorOptions options = {})
      : model_(model), opt_(std::move(options)) {}

  /// Advances `s` by h. Returns false (state untouched) if the model is
  /// invalid at the new position; `violation` then holds the report.
  bool advance(detail::RayState& s, double h, RayTrajectory& traj, int depth = 0) const {
    const detail::RayState next = detail::rk4_step(model_, s, h, opt_.spray);
    const Point q{next.x, next.y};
    if (!std::isfinite(next.x) || !std::isfinite(next.y) || !std::isfinite(next.v1) ||
        !std::isfinite(next.v2))
      throw IntegrationError("non-finite state in geodesic step");
    if (!model_.position_independent()) {
      const ValidityReport rep = model_.validity_at(q);
      if (!rep.ok()) {
        std::ostringstream os;
        os.precision(10);
        os << "Model " << model_number(model_.kind()) << " invalid at (" << q.x << ", " << q.y
           << "): " << rep.summary();
        traj.violation = os.str();
        return false;
      }
    }
    const double F = metric_value(model_.at(q), {next.v1, next.v2});
    const double drift = std::abs(F - 1.0);
    if (drift > opt_.max_drift) {
      if (depth >= opt_.max_halvings) {
        std::ostringstream os;
        os << "unit-speed drift " << drift << " persists after " << depth << " step halvings";
        throw IntegrationError(os.str());
      }
      ++traj.rejected_steps;
      detail::RayState half = s;
      if (!advance(half, 0.5 * h, traj, depth + 1)) return false;
      if (!advance(half, 0.5 * h, traj, depth + 1)) return false;
      s = half;
      return true;
    }
    traj.max_drift = std::max(traj.max_drift, drift);
    s = next;
    if (opt_.renormalize) {
      s.v1 /= F;
      s.v2 /= F;
    }
    return true;
  }

  RayTrajectory integrate(Point p, TangentVector v, double T, double h) const {
    if (!(h > 0.0)) throw InvalidInput("h", "step size must be positive");
    if (!(T >= 0.0)) throw InvalidInput("T", "duration must be non-negative");
    if (v.is_zero()) throw UndefinedAtZero();
    require_valid(model_, p);
    const double F0 = metric_value(model_.at(p), v);
    if (std::abs(F0 - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "initial velocity must be unit (F = " << F0 << ")";
      throw InvalidInput("v", os.str());
    }

    RayTrajectory traj;
    traj.model_tag = model_.kind();
    detail::RayState s{p.x, p.y, v.v1, v.v2};
    traj.samples.push_back({0.0, s.x, s.y, s.v1, s.v2});
    if (T == 0.0) return traj;

    std::vector<double> stops;
    for (double c : opt_.checkpoints)
      if (c > 0.0 && c < T) stops.push_back(c);
    std::sort(stops.begin(), stops.end());
    stops.push_back(T);

    double t = 0.0;
    for (double stop : stops) {
      const double span = stop - t;
      if (span <= 0.0) continue;
      const auto n = static_cast<long>(std::ceil(span / h - 1e-9));
      const double hs = span / static_cast<double>(n);
      for (long k = 1; k <= n; ++k) {
        if (!advance(s, hs, traj)) {
          traj.truncated = true;
          return traj;
        }
        const double tk = k == n ? stop : t + k * hs;
        if (opt_.record_every_step || k == n) traj.samples.push_back({tk, s.x, s.y, s.v1, s.v2});
      }
      t = stop;
    }
    return traj;
  }

 private:
  const MetricModel& model_;
  IntegratorOptions opt_;
};

inline RayTrajectory integrate_geodesic(const MetricModel& model, Point p, TangentVector v,
                                        double T, double h = kDefaultGeodesicStep,
                                        const IntegratorOptions& options = {}) {
  return GeodesicIntegrator(model, options).integrate(p, v, T, h);
}

/// gamma(T) for the geodesic leaving p with unit velocity at angle theta.
inline Point exponential_front_point(const MetricModel& model, Point p, double theta, double T,
                                     double h = kDefaultGeodesicStep) {
  const TangentVector v = unit_vector_at_angle(model, p, theta);
  if (T == 0.0) return p;
  if (model.position_independent()) return p + T * v;
  IntegratorOptions opt;
  opt.record_every_step = false;
  const RayTrajectory r = integrate_geodesic(model, p, v, T, h, opt);
  if (r.truncated) throw ModelInvalid(r.violation);
  return r.endpoint();
}

}  // namespace wildfire
