#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "oracle_values.hpp"
#include "wildfire/rothermel.hpp"

using namespace wildfire;
using namespace wildfire::rothermel;

namespace {

#define EXPECT_SIX_DIGITS(got, want) EXPECT_PRED2(oracle::six_digits, got, want)

TEST(Rothermel, PackingRatiosDirectDivision) {
  FuelBed f = oracle::fuel();
  f.w_o = 0.032;
  const auto pr = packing_ratios(f);
  EXPECT_DOUBLE_EQ(pr.rho_b, 0.032);
  EXPECT_DOUBLE_EQ(pr.beta, 0.001);
  f.w_o = 0.032;
  f.delta = 32.0;
  EXPECT_DOUBLE_EQ(packing_ratios(f).rho_b, 0.001);
  EXPECT_DOUBLE_EQ(packing_ratios(f).beta, 3.125e-5);
}

TEST(Rothermel, OptimumPackingRatioMatchesOracle) {
  EXPECT_SIX_DIGITS(packing_ratios(oracle::fuel()).beta_op, oracle::beta_op);
}

TEST(Rothermel, NonPositiveInputsNameTheField) {
  for (auto [field, mutate] : std::vector<std::pair<std::string, void (*)(FuelBed&)>>{
           {"w_o", [](FuelBed& f) { f.w_o = 0.0; }},
           {"sigma", [](FuelBed& f) { f.sigma = -1.0; }},
           {"delta", [](FuelBed& f) { f.delta = 0.0; }},
           {"rho_p", [](FuelBed& f) { f.rho_p = 0.0; }},
           {"M_f", [](FuelBed& f) { f.M_f = 1.5; }},
           {"S_e", [](FuelBed& f) { f.S_e = -0.1; }}}) {
    FuelBed f = oracle::fuel();
    mutate(f);
    try {
      packing_ratios(f);
      ADD_FAILURE() << field << " accepted";
    } catch (const InvalidInput& e) {
      EXPECT_EQ(e.field(), field);
    }
  }
}

TEST(Rothermel, ZeroExtinctionMoistureRejected) {
  FuelBed f = oracle::fuel();
  f.M_x = 0.0;
  f.M_f = 0.0;
  try {
    reaction_intensity(f);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_EQ(e.field(), "M_x");
  }
}

TEST(Rothermel, SaturatedMoistureGivesZeroDamping) {
  FuelBed f = oracle::fuel();
  f.M_f = f.M_x;
  ChainIntermediates ch;
  const double I_R = reaction_intensity(f, &ch);
  EXPECT_EQ(ch.r_M, 1.0);
  EXPECT_EQ(ch.eta_M, 0.0);
  EXPECT_EQ(I_R, 0.0);
  EXPECT_EQ(no_wind_spread_rate(f), 0.0);
  f.M_f = 0.9;  // clamp on r_M
  reaction_intensity(f, &ch);
  EXPECT_EQ(ch.r_M, 1.0);
  EXPECT_EQ(ch.eta_M, 0.0);
}

TEST(Rothermel, MineralDampingClampDoesNotBindAtDefault) {
  ChainIntermediates ch;
  reaction_intensity(oracle::fuel(), &ch);
  EXPECT_SIX_DIGITS(ch.eta_s, oracle::eta_s);
  EXPECT_LT(ch.eta_s, 1.0);
  FuelBed f = oracle::fuel();
  f.S_e = 1e-6;  // 0.174 * 1e-6^-0.19 > 1
  reaction_intensity(f, &ch);
  EXPECT_EQ(ch.eta_s, 1.0);
}

TEST(Rothermel, FullChainMatchesOracle) {
  const ChainIntermediates ch = evaluate_chain(oracle::fuel(), oracle::env());
  EXPECT_SIX_DIGITS(ch.packing.beta, oracle::beta);
  EXPECT_SIX_DIGITS(ch.A, oracle::A);
  EXPECT_SIX_DIGITS(ch.gamma_max, oracle::gamma_max);
  EXPECT_SIX_DIGITS(ch.gamma, oracle::gamma);
  EXPECT_SIX_DIGITS(ch.w_n, oracle::w_n);
  EXPECT_SIX_DIGITS(ch.r_M, oracle::r_M);
  EXPECT_SIX_DIGITS(ch.eta_M, oracle::eta_M);
  EXPECT_SIX_DIGITS(ch.I_R, oracle::I_R);
  EXPECT_SIX_DIGITS(ch.xi, oracle::xi);
  EXPECT_SIX_DIGITS(ch.C, oracle::C);
  EXPECT_SIX_DIGITS(ch.B, oracle::B);
  EXPECT_SIX_DIGITS(ch.E, oracle::E);
  EXPECT_SIX_DIGITS(ch.epsilon, oracle::epsilon);
  EXPECT_SIX_DIGITS(ch.epsilon_standard, oracle::epsilon_standard);
  EXPECT_SIX_DIGITS(ch.Q_ig, oracle::Q_ig);
  const SpreadParams& p = ch.params;
  EXPECT_SIX_DIGITS(p.R0, oracle::R0);
  EXPECT_SIX_DIGITS(p.phi_s, oracle::phi_s);
  EXPECT_SIX_DIGITS(p.phi_w, oracle::phi_w);
  EXPECT_SIX_DIGITS(p.R_H, oracle::R_H);
  EXPECT_SIX_DIGITS(p.R_B, oracle::R_B);
  EXPECT_SIX_DIGITS(p.a, oracle::a);
  EXPECT_SIX_DIGITS(p.b, oracle::b);
  EXPECT_SIX_DIGITS(p.c, oracle::c);
}

TEST(Rothermel, StandardVariantDividesByHeatSink) {
  const FuelBed f = oracle::fuel();
  const double std_R0 = no_wind_spread_rate(f, RothermelVariant::kStandard);
  EXPECT_SIX_DIGITS(std_R0, oracle::R0_standard);
  EXPECT_NEAR(std_R0, oracle::R0 / (oracle::rho_b * oracle::epsilon_standard * oracle::Q_ig),
              1e-12 * std_R0);
}

TEST(Rothermel, NoWindMeansCircularFrame) {
  Environment env = oracle::env();
  env.U = 0.0;
  env.tan_phi = 0.1;
  const ChainIntermediates ch = evaluate_chain(oracle::fuel(), env);
  EXPECT_EQ(ch.z, 1.0);
  EXPECT_EQ(ch.e, 0.0);
  EXPECT_EQ(ch.params.phi_w, 0.0);
  EXPECT_EQ(ch.params.R_B, ch.params.R_H);
  EXPECT_EQ(ch.params.c, 0.0);
  EXPECT_DOUBLE_EQ(ch.params.R_H, ch.params.R0 * (1.0 + ch.params.phi_s));
}

TEST(Rothermel, WindOfFourGivesKnownEccentricity) {
  Environment env = oracle::env();
  env.U = 4.0;
  const ChainIntermediates ch = evaluate_chain(oracle::fuel(), env);
  EXPECT_EQ(ch.z, 2.0);
  EXPECT_DOUBLE_EQ(ch.e, std::sqrt(3.0) / 2.0);
}

TEST(Rothermel, FlatGroundHasNoSlopeFactor) {
  Environment env = oracle::env();
  env.tan_phi = 0.0;
  EXPECT_EQ(slope_factor(oracle::fuel(), env), 0.0);
}

TEST(Rothermel, UnitPackingRatioSlopeFactor) {
  FuelBed f = oracle::fuel();
  f.w_o = 32.0;  // beta = 1
  EXPECT_NEAR(slope_factor(f, {0.0, 0.2, 0.0}), 0.211, 1e-14);
}

TEST(Rothermel, OptimalPackingWindFactorIsCUB) {
  FuelBed f = oracle::fuel();
  const double beta_op = packing_ratios(f).beta_op;
  f.w_o = beta_op * f.rho_p * f.delta;
  const double C = 7.47 * std::exp(-0.133 * std::pow(f.sigma, 0.55));
  const double B = 0.02526 * std::pow(beta_op, 0.54);
  EXPECT_SIX_DIGITS(C, oracle::C);
  EXPECT_NEAR(wind_factor(f, {50.0, 0.0, 0.0}), C * std::pow(50.0, B), 1e-12 * C);
}

TEST(Rothermel, ZeroRatesGiveDegenerateFrame) {
  FuelBed f = oracle::fuel();
  f.M_f = f.M_x;
  EXPECT_THROW(spread_params(f, oracle::env()), DegenerateFrame);
}

TEST(Rothermel, MonotoneInWindAndSlope) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 500.0), tp(0.0, 1.0);
  const FuelBed f = oracle::fuel();
  for (int i = 0; i < 200; ++i) {
    double u1 = U(rng), u2 = U(rng);
    if (u1 > u2) std::swap(u1, u2);
    EXPECT_LE(wind_factor(f, {u1, 0.0, 0.0}), wind_factor(f, {u2, 0.0, 0.0}));
    double t1 = tp(rng), t2 = tp(rng);
    if (t1 > t2) std::swap(t1, t2);
    EXPECT_LE(slope_factor(f, {0.0, t1, 0.0}), slope_factor(f, {0.0, t2, 0.0}));
  }
}

TEST(Rothermel, FrameInvariantsOnRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> sigma(500.0, 4000.0), load(0.005, 0.2), depth(0.2, 3.0),
      mx(0.1, 0.4), frac(0.0, 1.0), wind(0.0, 800.0), slope(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    FuelBed f;
    f.sigma = sigma(rng);
    f.w_o = load(rng);
    f.delta = depth(rng);
    f.M_x = mx(rng);
    f.M_f = frac(rng) * 0.99 * f.M_x;
    const Environment env{wind(rng), slope(rng), 2.0 * frac(rng)};
    const ChainIntermediates ch = evaluate_chain(f, env);
    const SpreadParams& p = ch.params;
    EXPECT_LE(ch.eta_M, 1.0);
    EXPECT_LE(ch.eta_s, 1.0);
    EXPECT_LE(ch.r_M, 1.0);
    EXPECT_LE(p.R_B, p.R_H);
    EXPECT_GE(p.c, 0.0);
    EXPECT_DOUBLE_EQ(p.b, 0.5 * (p.R_H + p.R_B));
    EXPECT_DOUBLE_EQ(p.c, 0.5 * (p.R_H - p.R_B));
    if (p.R_B > 0.0) EXPECT_GT(p.b, p.c);
  }
}

TEST(Rothermel, ChainIsBitDeterministic) {
  const SpreadParams p = spread_params(oracle::fuel(), oracle::env());
  const SpreadParams q = spread_params(oracle::fuel(), oracle::env());
  EXPECT_EQ(std::memcmp(&p, &q, sizeof p), 0);
}

TEST(Rothermel, WindDirectionNormalized) {
  const SpreadParams p = frame_from_rates(1.0, 0.1, 0.1, 4.0, -M_PI / 2);
  EXPECT_DOUBLE_EQ(p.theta_hat, 1.5 * M_PI);
}

}  // namespace
