#pragma once

// Rothermel frame-parameter chain in ft, min, Btu and lb.
//
// The default chain uses B = 0.02526 beta^0.54, E = 0.715 exp(-3.59e-4 delta)
// and R0 = I_R xi with no heat-sink term. RothermelVariant::kStandard divides
// R0 by rho_b eps Q_ig with eps = exp(-138 / sigma).

#include <algorithm>
#include <cmath>
#include <string>

#include "wildfire/error.hpp"
#include "wildfire/vec.hpp"

namespace wildfire::rothermel {

struct FuelBed {
  double sigma = 0.0;   // surface-area-to-volume ratio, ft^2/ft^3
  double w_o = 0.0;     // oven-dry fuel load, lb/ft^2
  double delta = 0.0;   // fuel bed depth, ft
  double M_x = 0.0;     // dead fuel moisture of extinction, fraction
  double M_f = 0.0;     // moisture content, fraction (dry weight)
  double h = 8000.0;    // low heat content, Btu/lb
  double S_T = 0.0555;  // total mineral content
  double S_e = 0.010;   // effective mineral content
  double rho_p = 32.0;  // oven-dry particle density, lb/ft^3
};

struct Environment {
  double U = 0.0;          // mid-flame wind speed, ft/min
  double tan_phi = 0.0;    // slope steepness
  double theta_hat = 0.0;  // wind direction relative to upslope, radians
};

enum class RothermelVariant {
  kDefault,  // R0 = I_R * xi
  kStandard,   // R0 = I_R * xi / (rho_b * eps * Q_ig), eps = exp(-138 / sigma)
};

struct PackingRatios {
  double beta = 0.0;
  double beta_op = 0.0;
  double rho_b = 0.0;
};

struct SpreadParams {
  double R0 = 0.0;
  double phi_s = 0.0;
  double phi_w = 0.0;
  double R_H = 0.0;
  double R_B = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double theta_hat = 0.0;
  double U = 0.0;
};

/// Every row of the chain, for reporting.
struct ChainIntermediates {
  PackingRatios packing;
  double A = 0.0;
  double gamma_max = 0.0;
  double gamma = 0.0;
  double w_n = 0.0;
  double r_M = 0.0;
  double eta_M = 0.0;
  double eta_s = 0.0;
  double I_R = 0.0;
  double xi = 0.0;
  double C = 0.0;
  double B = 0.0;
  double E = 0.0;
  double epsilon = 0.0;           // exp(-138 / delta)
  double epsilon_standard = 0.0;  // exp(-138 / sigma)
  double Q_ig = 0.0;
  double z = 0.0;
  double e = 0.0;
  SpreadParams params;
};

namespace detail {

inline void require(bool ok, const char* field, const char* what) {
  if (!ok) throw InvalidInput(field, what);
}

}  // namespace detail

inline void validate(const FuelBed& f) {
  using detail::require;
  require(std::isfinite(f.sigma) && f.sigma > 0.0, "sigma", "must be strictly positive");
  require(std::isfinite(f.w_o) && f.w_o > 0.0, "w_o", "must be strictly positive");
  require(std::isfinite(f.delta) && f.delta > 0.0, "delta", "must be strictly positive");
  require(std::isfinite(f.rho_p) && f.rho_p > 0.0, "rho_p", "must be strictly positive");
  require(std::isfinite(f.h) && f.h >= 0.0, "h", "must be non-negative");
  require(f.M_x >= 0.0 && f.M_x <= 1.0, "M_x", "must lie in [0, 1]");
  require(f.M_f >= 0.0 && f.M_f <= 1.0, "M_f", "must lie in [0, 1]");
  require(f.S_T >= 0.0 && f.S_T <= 1.0, "S_T", "must lie in [0, 1]");
  require(f.S_e >= 0.0 && f.S_e <= 1.0, "S_e", "must lie in [0, 1]");
}

inline void validate(const Environment& env) {
  using detail::require;
  require(std::isfinite(env.U) && env.U >= 0.0, "U", "must be non-negative");
  require(std::isfinite(env.tan_phi) && env.tan_phi >= 0.0, "tan_phi", "must be non-negative");
  require(std::isfinite(env.theta_hat), "theta_hat", "must be finite");
}

inline PackingRatios packing_ratios(const FuelBed& fuel) {
  validate(fuel);
  PackingRatios r;
  r.rho_b = fuel.w_o / fuel.delta;
  r.beta = r.rho_b / fuel.rho_p;
  r.beta_op = 3.348 * std::pow(fuel.sigma, -0.8189);
  return r;
}

namespace detail {

inline double moisture_ratio(const FuelBed& f) {
  if (!(f.M_x > 0.0)) throw InvalidInput("M_x", "must be strictly positive for the moisture ratio");
  return std::min(f.M_f / f.M_x, 1.0);
}

inline double moisture_damping(double r_M) {
  // The cubic has an exact root at r_M = 1 that double rounding misses by 4e-16.
  if (r_M >= 1.0) return 0.0;
  return 1.0 - 2.59 * r_M + 5.11 * r_M * r_M - 3.52 * r_M * r_M * r_M;
}

inline double mineral_damping(double S_e) { return std::min(0.174 * std::pow(S_e, -0.19), 1.0); }

}  // namespace detail

inline double reaction_intensity(const FuelBed& fuel, ChainIntermediates* out = nullptr) {
  const PackingRatios pr = packing_ratios(fuel);
  const double r_M = detail::moisture_ratio(fuel);
  const double A = 133.0 * std::pow(fuel.sigma, -0.7913);
  const double s15 = std::pow(fuel.sigma, 1.5);
  const double gamma_max = s15 / (495.0 + 0.0594 * s15);
  const double ratio = pr.beta / pr.beta_op;
  const double gamma = gamma_max * std::pow(ratio, A) * std::exp(A * (1.0 - ratio));
  const double w_n = fuel.w_o * (1.0 - fuel.S_T);
  const double eta_M = detail::moisture_damping(r_M);
  const double eta_s = detail::mineral_damping(fuel.S_e);
  const double I_R = gamma * w_n * fuel.h * eta_M * eta_s;
  if (out) {
    out->packing = pr;
    out->A = A;
    out->gamma_max = gamma_max;
    out->gamma = gamma;
    out->w_n = w_n;
    out->r_M = r_M;
    out->eta_M = eta_M;
    out->eta_s = eta_s;
    out->I_R = I_R;
  }
  return I_R;
}

inline double propagating_flux_ratio(const FuelBed& fuel) {
  const PackingRatios pr = packing_ratios(fuel);
  return std::exp((0.792 + 0.681 * std::sqrt(fuel.sigma)) * (pr.beta + 0.1)) /
         (192.0 + 0.2595 * fuel.sigma);
}

inline double effective_heating_number(const FuelBed& fuel) { return std::exp(-138.0 / fuel.delta); }
inline double effective_heating_number_standard(const FuelBed& fuel) {
  return std::exp(-138.0 / fuel.sigma);
}
inline double heat_of_preignition(const FuelBed& fuel) { return 250.0 + 1116.0 * fuel.M_x; }

inline double no_wind_spread_rate(const FuelBed& fuel,
                                  RothermelVariant variant = RothermelVariant::kDefault) {
  const double R0 = reaction_intensity(fuel) * propagating_flux_ratio(fuel);
  if (variant == RothermelVariant::kDefault) return R0;
  const PackingRatios pr = packing_ratios(fuel);
  return R0 / (pr.rho_b * effective_heating_number_standard(fuel) * heat_of_preignition(fuel));
}

inline double wind_factor(const FuelBed& fuel, const Environment& env) {
  validate(env);
  const PackingRatios pr = packing_ratios(fuel);
  if (env.U == 0.0) return 0.0;
  const double C = 7.47 * std::exp(-0.133 * std::pow(fuel.sigma, 0.55));
  const double B = 0.02526 * std::pow(pr.beta, 0.54);
  const double E = 0.715 * std::exp(-3.59e-4 * fuel.delta);
  return C * std::pow(env.U, B) * std::pow(pr.beta / pr.beta_op, -E);
}

inline double slope_factor(const FuelBed& fuel, const Environment& env) {
  validate(env);
  const PackingRatios pr = packing_ratios(fuel);
  return 5.275 * std::pow(pr.beta, -0.3) * env.tan_phi * env.tan_phi;
}

/// Heading/backing rates and the elliptical frame from R0 and the factors.
/// Shared by the fuel chain and by direct scenario input.
inline SpreadParams frame_from_rates(double R0, double phi_s, double phi_w, double U,
                                     double theta_hat) {
  SpreadParams p;
  p.R0 = R0;
  p.phi_s = phi_s;
  p.phi_w = phi_w;
  p.U = U;
  p.theta_hat = normalize_angle(theta_hat);
  p.R_H = R0 * (1.0 + phi_w + phi_s);
  const double z = 1.0 + 0.25 * U;
  const double e = std::sqrt(z * z - 1.0) / z;
  p.R_B = p.R_H * (1.0 - e) / (1.0 + e);
  if (p.R_H + p.R_B == 0.0) throw DegenerateFrame("R_H + R_B = 0: frame parameter a is undefined");
  p.a = z / (2.0 * (p.R_B + p.R_H));
  p.b = 0.5 * (p.R_B + p.R_H);
  p.c = 0.5 * (p.R_H - p.R_B);
  return p;
}

inline ChainIntermediates evaluate_chain(const FuelBed& fuel, const Environment& env,
                                         RothermelVariant variant = RothermelVariant::kDefault) {
  validate(env);
  ChainIntermediates ch;
  reaction_intensity(fuel, &ch);
  ch.xi = propagating_flux_ratio(fuel);
  ch.C = 7.47 * std::exp(-0.133 * std::pow(fuel.sigma, 0.55));
  ch.B = 0.02526 * std::pow(ch.packing.beta, 0.54);
  ch.E = 0.715 * std::exp(-3.59e-4 * fuel.delta);
  ch.epsilon = effective_heating_number(fuel);
  ch.epsilon_standard = effective_heating_number_standard(fuel);
  ch.Q_ig = heat_of_preignition(fuel);
  ch.z = 1.0 + 0.25 * env.U;
  ch.e = std::sqrt(ch.z * ch.z - 1.0) / ch.z;
  const double R0 = no_wind_spread_rate(fuel, variant);
  ch.params = frame_from_rates(R0, slope_factor(fuel, env), wind_factor(fuel, env), env.U,
                               env.theta_hat);
  return ch;
}

inline SpreadParams spread_params(const FuelBed& fuel, const Environment& env,
                                  RothermelVariant variant = RothermelVariant::kDefault) {
  return evaluate_chain(fuel, env, variant).params;
}

}  // namespace wildfire::rothermel
