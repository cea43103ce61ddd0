#pragma once

#include <cmath>
#include <numbers>

namespace wildfire {

/// A point of the plane in its intrinsic coordinates. Uphill is +x.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point&, const Point&) = default;
};

/// A tangent vector at some point of the plane (length per unit time).
struct TangentVector {
  double v1 = 0.0;
  double v2 = 0.0;

  constexpr double norm_squared() const { return v1 * v1 + v2 * v2; }
  double norm() const { return std::hypot(v1, v2); }
  double angle() const { return std::atan2(v2, v1); }
  constexpr bool is_zero() const { return v1 == 0.0 && v2 == 0.0; }

  friend constexpr TangentVector operator*(double s, TangentVector v) {
    return {s * v.v1, s * v.v2};
  }
  friend constexpr TangentVector operator+(TangentVector a, TangentVector b) {
    return {a.v1 + b.v1, a.v2 + b.v2};
  }
  friend constexpr TangentVector operator-(TangentVector a, TangentVector b) {
    return {a.v1 - b.v1, a.v2 - b.v2};
  }
  friend constexpr bool operator==(const TangentVector&, const TangentVector&) = default;
};

constexpr double dot(TangentVector a, TangentVector b) { return a.v1 * b.v1 + a.v2 * b.v2; }
constexpr double cross(TangentVector a, TangentVector b) { return a.v1 * b.v2 - a.v2 * b.v1; }

constexpr Point operator+(Point p, TangentVector v) { return {p.x + v.v1, p.y + v.v2}; }
constexpr TangentVector operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline TangentVector polar(double radius, double theta) {
  return {radius * std::cos(theta), radius * std::sin(theta)};
}

/// Wraps an angle into [0, 2*pi).
inline double normalize_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

}  // namespace wildfire
