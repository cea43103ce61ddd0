// Acceptance suite: one PASS/FAIL line per criterion, each at its stated
// tolerance. `--criterion N` runs a single one; the exit status is nonzero
// when any criterion that ran failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "model_samples.hpp"
#include "oracle_values.hpp"
#include "parser_fuzz.hpp"
#include "wildfire/propagation.hpp"
#include "wildfire/scenario_io.hpp"

using namespace wildfire;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "FAILED ") + what);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::filesystem::path scenario_path(const char* name) {
  return std::filesystem::path(WILDFIRE_SOURCE_DIR) / "scenarios" / name;
}

double max_radial_error(const FrontPolyline& f, const std::function<double(double)>& r) {
  double worst = 0.0;
  for (const Point& q : f.points) worst = std::max(worst, std::abs(std::hypot(q.x, q.y) - r(std::atan2(q.y, q.x))));
  return worst;
}

FrontPolyline huygens_from_point(const MetricModel& m, double t0, double dt, int steps, double res) {
  FrontPolyline f = spherical_front(m, {0, 0}, t0, 64);
  for (int k = 0; k < steps; ++k) f = huygens_step(m, f, dt, 32, res);
  return f;
}

Verdict indicatrix_exactness() {
  Verdict v;
  const auto m = MetricModel::model1(1.0, 0.45);
  const auto f = spherical_front(m, {0, 0}, 1.0, 3600);
  const double err = max_radial_error(f, [](double th) { return 1.0 + 0.45 * std::cos(th); });
  v.check(err < 1e-12, "max radial error " + fmt("%.3g", err) + " < 1e-12");
  const auto box = bounding_box(f.points);
  const double ratio_err = std::abs(box.xmax / -box.xmin - 1.45 / 0.55);
  v.check(ratio_err < 1e-9, "uphill/downhill ratio error " + fmt("%.3g", ratio_err) + " < 1e-9");
  return v;
}

Verdict validity_gates() {
  Verdict v;
  auto message = [](const std::function<void()>& build) -> std::string {
    try {
      build();
    } catch (const ModelInvalid& e) {
      return e.what();
    }
    return "";
  };
  const auto at_half = message([] { MetricModel::model1(1.0, 0.5); });
  v.check(at_half.find("phi_s < 0.5") != std::string::npos, "phi_s = 0.5 rejected: " + at_half);
  v.check(message([] { MetricModel::model1(1.0, 0.49); }).empty(), "phi_s = 0.49 accepted");
  // R_H = b + c = 1.5 gives R_H^2 = 9/8 (1 + 0.25 U) exactly at U = 4.
  const auto on_bound = message([] { MetricModel::model2(1.0, 1.0, 0.5, 0.0, 4.0); });
  v.check(on_bound.find("R_H^2 < 9/8 (1 + 0.25 U) violated") != std::string::npos,
          "R_H^2 = bound rejected: " + on_bound);
  const auto above = message([] { MetricModel::model2(2.0, 1.5, 0.5, 0.0, 0.0); });
  v.check(above.find("R_H^2 < 9/8 (1 + 0.25 U) violated") != std::string::npos,
          "R_H^2 > bound rejected: " + above);
  v.check(message([] { MetricModel::model2(2.0, 1.5, 0.5, 0.0, 44.0); }).empty(), "R_H^2 < bound accepted");
  return v;
}

Verdict geodesic_straightness() {
  Verdict v;
  std::mt19937_64 rng(301);
  std::uniform_real_distribution<double> angle(0.0, 2 * pi);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto m = samples::random_model2(rng);
    const Point p = samples::random_point(rng);
    const TangentVector u = unit_vector_at_angle(m, p, angle(rng));
    const auto r = integrate_geodesic(m, p, u, 10.0, 0.01);
    for (const auto& s : r.samples) worst = std::max(worst, distance(s.point(), p + s.t * u));
  }
  v.check(worst < 1e-6, "max deviation from straight line " + fmt("%.3g", worst) + " < 1e-6");
  double spray = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto m1 = samples::random_model1(rng);
    const auto m2 = samples::random_model2(rng);
    const Point p = samples::random_point(rng);
    const TangentVector u = samples::random_vector(rng);
    for (const auto* m : {&m1, &m2}) {
      const auto G = spray_coefficients(*m, p, u);
      spray = std::max({spray, std::abs(G[0]), std::abs(G[1])});
    }
  }
  v.check(spray < 1e-8, "max |G| over 100 samples " + fmt("%.3g", spray) + " < 1e-8");
  return v;
}

/// Largest angular gap between two root sets; infinite when counts differ.
double root_gap(const std::vector<OrthogonalDirection>& a, const std::vector<OrthogonalDirection>& b) {
  if (a.size() != b.size() || a.empty()) return std::numeric_limits<double>::infinity();
  double gap = 0.0;
  for (const auto& r : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : b) best = std::min(best, std::abs(normalize_angle(r.theta - s.theta + pi) - pi));
    gap = std::max(gap, best);
  }
  return gap;
}

Verdict orthogonality_equivalence() {
  Verdict v;
  std::mt19937_64 rng(404);
  const MetricModel m3 = samples::field_model3();
  const MetricModel m4 = samples::field_model4();
  int agree = 0, total = 0, rootless = 0;
  double worst = 0.0;
  const char* names[] = {"1", "2", "3", "4"};
  int agree_by_model[4] = {0, 0, 0, 0};
  for (int i = 0; i < 1000; ++i) {
    const int k = i % 4;
    const MetricModel m = k == 0 ? samples::random_model1(rng)
                          : k == 1 ? samples::random_model2(rng)
                          : k == 2 ? m3
                                   : m4;
    const Point p = samples::random_point(rng, 1.0);
    const TangentVector u = samples::random_vector(rng);
    const auto g_roots = orthogonal_directions(m, p, u);
    std::vector<OrthogonalDirection> c_roots;
    try {
      c_roots = orthogonal_directions(m, p, u, OrthogonalityRule::kClosedForm);
    } catch (const NoOrthogonalDirection&) {
      ++rootless;
    }
    const double gap = root_gap(g_roots, c_roots);
    ++total;
    if (gap <= 1e-6) {
      ++agree;
      ++agree_by_model[k];
    }
    if (std::isfinite(gap)) worst = std::max(worst, gap);
  }
  std::string per_model;
  for (int k = 0; k < 4; ++k)
    per_model += std::string(k ? ", " : "") + "M" + names[k] + " " + std::to_string(agree_by_model[k]) + "/250";
  v.check(agree == total, "closed-form roots within 1e-6 rad of g_v(v,u) = 0 roots on " +
                              std::to_string(agree) + "/" + std::to_string(total) + " samples (" + per_model +
                              "; " + std::to_string(rootless) + " without closed-form roots; worst finite gap " +
                              fmt("%.3g", worst) + " rad)");

  double factor_gap = 0.0;
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    const auto m2 = samples::random_model2(rng);
    const auto l = m2.at({});
    const auto m4c = MetricModel::model4(l.a, l.b, l.c, l.theta_hat, m2.wind_speed_at({}));
    const TangentVector u = samples::random_vector(rng);
    auto roots = [&](const MetricModel& m) {
      try {
        return orthogonal_directions(m, {}, u, OrthogonalityRule::kClosedForm);
      } catch (const NoOrthogonalDirection&) {
        return std::vector<OrthogonalDirection>{};
      }
    };
    const auto a = roots(m2), b = roots(m4c);
    if (a.empty() && b.empty()) continue;
    ++compared;
    factor_gap = std::max(factor_gap, root_gap(a, b));
  }
  v.check(compared > 0 && factor_gap < 1e-10, "scaled Model 2 and Model 4 closed-form roots agree to " +
                                                  fmt("%.3g", factor_gap) + " rad < 1e-10 on " +
                                                  std::to_string(compared) + " samples with roots");
  return v;
}

Verdict rothermel_chain() {
  Verdict v;
  auto env = oracle::env();
  env.U = 0.0;
  const auto calm = rothermel::evaluate_chain(oracle::fuel(), env);
  v.check(calm.params.R_B == calm.params.R_H, "U = 0 gives R_B == R_H exactly");
  auto wet = oracle::fuel();
  wet.M_f = wet.M_x;
  rothermel::ChainIntermediates sat;
  rothermel::reaction_intensity(wet, &sat);
  v.check(sat.r_M == 1.0 && sat.eta_M == 0.0, "r_M = 1 gives eta_M == 0 exactly");
  const auto ch = rothermel::evaluate_chain(oracle::fuel(), oracle::env());
  const std::pair<const char*, std::pair<double, double>> rows[] = {
      {"beta", {ch.packing.beta, oracle::beta}}, {"beta_op", {ch.packing.beta_op, oracle::beta_op}},
      {"A", {ch.A, oracle::A}},                  {"gamma_max", {ch.gamma_max, oracle::gamma_max}},
      {"gamma", {ch.gamma, oracle::gamma}},      {"w_n", {ch.w_n, oracle::w_n}},
      {"eta_M", {ch.eta_M, oracle::eta_M}},      {"eta_s", {ch.eta_s, oracle::eta_s}},
      {"I_R", {ch.I_R, oracle::I_R}},            {"xi", {ch.xi, oracle::xi}},
      {"C", {ch.C, oracle::C}},                  {"B", {ch.B, oracle::B}},
      {"E", {ch.E, oracle::E}},                  {"epsilon", {ch.epsilon, oracle::epsilon}},
      {"Q_ig", {ch.Q_ig, oracle::Q_ig}},         {"R0", {ch.params.R0, oracle::R0}},
      {"phi_s", {ch.params.phi_s, oracle::phi_s}}, {"phi_w", {ch.params.phi_w, oracle::phi_w}},
      {"R_H", {ch.params.R_H, oracle::R_H}},     {"R_B", {ch.params.R_B, oracle::R_B}},
      {"a", {ch.params.a, oracle::a}},           {"b", {ch.params.b, oracle::b}},
      {"c", {ch.params.c, oracle::c}}};
  std::string off;
  for (const auto& [name, vals] : rows)
    if (!oracle::six_digits(vals.first, vals.second)) off += std::string(" ") + name;
  v.check(off.empty(), "23 chain outputs match the oracle to 6 significant digits" + (off.empty() ? "" : ":" + off));
  return v;
}

Verdict huygens_semigroup() {
  Verdict v;
  const auto m = MetricModel::model1(1.0, 0.45);
  const double res = 0.05;
  const auto eight = huygens_from_point(m, 0.1, 0.02, 8, res);
  const auto one = huygens_from_point(m, 0.1, 0.16, 1, res);
  const double d = hausdorff_distance(eight, one);
  v.check(d < 2 * res, "Hausdorff(8 x dt, 1 x 8dt) = " + fmt("%.4g", d) + " < " + fmt("%.3g", 2 * res));
  return v;
}

Verdict cross_method() {
  Verdict v;
  const auto m = MetricModel::model2(2.0, 1.5, 0.5, 0.0, 44.0);
  const double res = 0.05;
  const auto rays = propagate_point_rays(m, {0, 0}, 2.0, 256, {});
  const auto huy = huygens_from_point(m, 0.1, 0.095, 20, res);
  const double d = hausdorff_distance(rays.fronts.back(), huy);
  v.check(rays.failures.empty(), "no ray failures");
  v.check(d < 3 * res, "Hausdorff(rays, Huygens) at t = 2 is " + fmt("%.4g", d) + " < " + fmt("%.3g", 3 * res));
  return v;
}

void check_run(Verdict& v, const char* name, const ScenarioResult& r) {
  std::size_t failures = 0;
  for (const auto& s : r.stages) failures += s.ray_failures;
  v.check(r.completed(), std::string(name) + " completed" + (r.completed() ? "" : " (" + r.failure + ")"));
  v.check(failures == 0, std::string(name) + " ray failures " + std::to_string(failures));
  bool nested = true;
  for (std::size_t k = 1; k < r.fronts.size(); ++k)
    nested = nested && contains(r.fronts[k].front, r.fronts[k - 1].front, 1e-9);
  v.check(nested, std::string(name) + " fronts nested (" + std::to_string(r.fronts.size()) + " fronts)");
}

Verdict reference_scenarios() {
  Verdict v;
  for (const char* name : {"example1a.json", "example1b.json", "example1c.json", "example2_rays.json",
                           "example2_huygens.json"}) {
    check_run(v, name, run_scenario(io::load_scenario(scenario_path(name)).scenario));
  }
  RunOptions tangled;
  tangled.untangle = false;
  const auto r = run_scenario(io::load_scenario(scenario_path("example1a.json")).scenario, tangled);
  std::size_t crossings = 0;
  for (const auto& f : r.fronts) crossings += f.self_intersections;
  v.check(crossings > 0, "example1a.json without untangling has " + std::to_string(crossings) + " front self-intersections");
  return v;
}

Verdict integrator_convergence() {
  Verdict v;
  const auto m = MetricModel::model3(field::ScalarField::parse("1.8-0.6*cos(x+y)"), 0.45);
  IntegratorOptions opt;
  opt.record_every_step = false;
  double lo = 1e300, hi = 0.0;
  for (int k = 0; k < 8; ++k) {
    const Point p{0.3, -0.2};
    const TangentVector u = unit_vector_at_angle(m, p, 2 * pi * k / 8 + 0.1);
    auto end = [&](double h) { return integrate_geodesic(m, p, u, 2.0, h, opt).endpoint(); };
    const Point ref = end(0.05 / 64);
    const double ratio = distance(end(0.05), ref) / distance(end(0.025), ref);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  v.check(lo >= 12.0 && hi <= 20.0, "error(0.05)/error(0.025) over 8 directions in [" + fmt("%.3f", lo) + ", " +
                                        fmt("%.3f", hi) + "] within [12, 20]");
  return v;
}

Verdict parser() {
  Verdict v;
  struct Spot {
    const char* text;
    double x, y, want;
  };
  const Spot spots[] = {
      {"1.8-0.6*cos(x+y)", 0.0, 0.0, 1.2},
      {"1.8-0.6*cos(x+y)", 1.0, 2.0, 1.8 - 0.6 * std::cos(3.0)},
      {"3.5+cos(y)^2", 0.0, 0.0, 4.5},
      {"3.5+cos(y)^2", 4.0, pi / 3, 3.75},
      {"2.8-1.6*cos(x+y)", 0.0, 0.0, 1.2},
      {"2.8-1.6*cos(x+y)", -0.5, 2.0, 2.8 - 1.6 * std::cos(1.5)},
  };
  double worst = 0.0;
  for (const Spot& s : spots) {
    const double got = field::Expr::parse(s.text)(s.x, s.y);
    worst = std::max(worst, std::abs(got - s.want));
  }
  v.check(worst < 1e-14, "field expressions at spot points, max error " + fmt("%.3g", worst));
  const fuzz::Outcome o = fuzz::run(50000, 2024);
  v.check(o.crashes == 0 && o.bad_offsets == 0,
          "50000 fuzzed inputs: " + std::to_string(o.parsed) + " parsed, " + std::to_string(o.syntax_errors) +
              " syntax errors, " + std::to_string(o.unknown_identifiers) + " unknown identifiers, " +
              std::to_string(o.crashes) + " crashes");
  return v;
}

struct Criterion {
  int id;
  const char* title;
  Verdict (*run)();
};

const Criterion kCriteria[] = {
    {1, "indicatrix exactness", indicatrix_exactness},
    {2, "validity gates", validity_gates},
    {3, "geodesic straightness", geodesic_straightness},
    {4, "orthogonality equivalence", orthogonality_equivalence},
    {5, "fuel chain", rothermel_chain},
    {6, "Huygens semigroup", huygens_semigroup},
    {7, "rays vs Huygens", cross_method},
    {8, "reference scenarios end to end", reference_scenarios},
    {9, "integrator convergence", integrator_convergence},
    {10, "expression parser", parser},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  bool verbose = false;
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  app.add_flag("--verbose", verbose, "print every check, not just failures");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (const Criterion& c : kCriteria) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.check(false, std::string("unexpected exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s) [%.1f s]\n", v.pass ? "PASS" : "FAIL", c.id, c.title, secs);
    for (const auto& n : v.notes)
      if (verbose || !v.pass || only) std::printf("    %s\n", n.c_str());
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
