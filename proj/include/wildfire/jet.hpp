#pragma once

// Forward-mode dual number with two partials, used to carry positional
// derivatives of metric parameters through the fundamental form.

#include <array>
#include <cmath>

namespace wildfire {

struct Jet {
  double v = 0.0;
  std::array<double, 2> d{};

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly
  constexpr Jet(double value, double dx, double dy) : v(value), d{dx, dy} {}

  friend constexpr Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d[0] + b.d[0], a.d[1] + b.d[1]}; }
  friend constexpr Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d[0] - b.d[0], a.d[1] - b.d[1]}; }
  friend constexpr Jet operator-(Jet a) { return {-a.v, -a.d[0], -a.d[1]}; }
  friend constexpr Jet operator*(Jet a, Jet b) {
    return {a.v * b.v, a.d[0] * b.v + a.v * b.d[0], a.d[1] * b.v + a.v * b.d[1]};
  }
  friend constexpr Jet operator/(Jet a, Jet b) {
    const double q = a.v / b.v;
    return {q, (a.d[0] - q * b.d[0]) / b.v, (a.d[1] - q * b.d[1]) / b.v};
  }
};

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

inline Jet sqrt(Jet a) {
  const double s = std::sqrt(a.v);
  const double k = 0.5 / s;
  return {s, k * a.d[0], k * a.d[1]};
}
inline Jet cos(Jet a) {
  const double s = -std::sin(a.v);
  return {std::cos(a.v), s * a.d[0], s * a.d[1]};
}
inline Jet sin(Jet a) {
  const double c = std::cos(a.v);
  return {std::sin(a.v), c * a.d[0], c * a.d[1]};
}

}  // namespace wildfire
