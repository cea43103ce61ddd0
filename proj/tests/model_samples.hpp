#pragma once

// Random valid models and sample points shared by the finsler tests and the
// acceptance suite.

#include <algorithm>
#include <random>

#include "wildfire/finsler.hpp"

namespace samples {

inline wildfire::MetricModel random_model1(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> R0(0.2, 5.0), phi(0.0, 0.49);
  return wildfire::MetricModel::model1(R0(rng), phi(rng));
}

/// Frame parameters with 2c < b < a + c and the speed bound met by choosing U.
inline wildfire::MetricModel random_model2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> B(0.3, 2.0), frac(0.0, 0.45), extra(0.1, 3.0),
      angle(0.0, 6.283185307179586), slack(1.05, 3.0);
  const double b = B(rng);
  const double c = frac(rng) * b;
  const double a = b - c + extra(rng);
  const double need = (b + c) * (b + c) / (9.0 / 8.0);
  const double U = std::max(0.0, 4.0 * (need * slack(rng) - 1.0));
  return wildfire::MetricModel::model2(a, b, c, angle(rng), U);
}

inline wildfire::MetricModel field_model3() {
  return wildfire::MetricModel::model3(wildfire::field::ScalarField::parse("1.8-0.6*cos(x+y)"),
                                       wildfire::field::ScalarField::parse("0.3+0.15*sin(x)"));
}

inline wildfire::MetricModel field_model4() {
  using wildfire::field::ScalarField;
  return wildfire::MetricModel::model4(
      ScalarField::parse("2+0.3*sin(x)"), ScalarField::parse("1.5+0.2*cos(y)"),
      ScalarField::parse("0.5+0.1*sin(x+y)"), ScalarField::parse("0.4*x-0.2*y"), ScalarField(44.0));
}

inline wildfire::Point random_point(std::mt19937_64& rng, double extent = 3.0) {
  std::uniform_real_distribution<double> u(-extent, extent);
  return {u(rng), u(rng)};
}

inline wildfire::TangentVector random_vector(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586), len(0.1, 5.0);
  const double t = angle(rng), r = len(rng);
  return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace samples
