#pragma once

// The four slope metrics. Each is of polar form F(p, v) = |v| / W(p, theta_v),
// where W is the spherical fire-front speed in direction theta (measured
// counterclockwise from the uphill +x axis):
//
//   Models 1/3 (limacon):  W = R0 (1 + phi_s cos theta)
//   Models 2/4 (frame):    W = ab / sqrt(a^2 cos^2 psi + b^2 sin^2 psi) + c cos psi,
//                          psi = theta - theta_hat
//
// Models 1/2 have constant parameters; 3/4 read them from scalar fields.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wildfire/error.hpp"
#include "wildfire/fieldexpr.hpp"
#include "wildfire/jet.hpp"
#include "wildfire/rothermel.hpp"
#include "wildfire/vec.hpp"

namespace wildfire {

enum class ModelKind { kModel1 = 1, kModel2 = 2, kModel3 = 3, kModel4 = 4 };

inline int model_number(ModelKind k) { return static_cast<int>(k); }

/// Metric parameters frozen at one point. `frame` selects the W formula.
template <typename T>
struct LocalMetric {
  bool frame = false;
  T R0{};
  T phi_s{};
  T a{};
  T b{};
  T c{};
  T theta_hat{};
};

template <typename T>
struct PolarSpeed {
  T W;
  T dW;   // dW/dtheta
  T d2W;  // d2W/dtheta2
};

template <typename T>
PolarSpeed<T> polar_speed(const LocalMetric<T>& m, double theta) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  if (!m.frame) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {m.R0 * (T(1.0) + m.phi_s * c), -(m.R0 * m.phi_s) * s, -(m.R0 * m.phi_s) * c};
  }
  const T psi = T(theta) - m.theta_hat;
  const T C = cos(psi);
  const T S = sin(psi);
  const T a2 = m.a * m.a;
  const T b2 = m.b * m.b;
  const T Q = a2 * C * C + b2 * S * S;
  const T dQ = T(2.0) * (b2 - a2) * C * S;
  const T d2Q = T(2.0) * (b2 - a2) * (C * C - S * S);
  const T ab = m.a * m.b;
  const T rq = T(1.0) / sqrt(Q);  // Q^-1/2
  const T rq3 = rq * rq * rq;
  const T rq5 = rq3 * rq * rq;
  const T E = ab * rq;
  const T dE = T(-0.5) * ab * rq3 * dQ;
  const T d2E = T(0.75) * ab * rq5 * dQ * dQ - T(0.5) * ab * rq3 * d2Q;
  return {E + m.c * C, dE - m.c * S, d2E - m.c * C};
}

template <typename T>
struct Sym2 {
  T g11{};
  T g12{};
  T g22{};
};

/// Hessian of F^2/2 in v for a polar metric; independent of |v|.
template <typename T>
Sym2<T> polar_fundamental_form(const LocalMetric<T>& m, double theta) {
  const PolarSpeed<T> s = polar_speed(m, theta);
  const T inv = T(1.0) / s.W;
  const T h = inv * inv;
  const T h1 = T(-2.0) * s.dW * h * inv;
  const T h2 = T(6.0) * s.dW * s.dW * h * h - T(2.0) * s.d2W * h * inv;
  const T rr = h;
  const T rt = T(0.5) * h1;
  const T tt = h + T(0.5) * h2;
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  return {rr * (c * c) - T(2.0 * c * sn) * rt + tt * (sn * sn),
          rr * (c * sn) + rt * (c * c - sn * sn) - tt * (sn * c),
          rr * (sn * sn) + T(2.0 * sn * c) * rt + tt * (c * c)};
}

// ---------------------------------------------------------------------------
// Validity

struct ValidityCondition {
  std::string name;
  bool satisfied = true;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ValidityReport {
  std::vector<ValidityCondition> conditions;

  bool ok() const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const auto& c) { return c.satisfied; });
  }

  std::vector<ValidityCondition> failures() const {
    std::vector<ValidityCondition> out;
    for (const auto& c : conditions)
      if (!c.satisfied) out.push_back(c);
    return out;
  }

  std::string summary() const {
    std::ostringstream os;
    os.precision(10);
    bool first = true;
    for (const auto& c : conditions) {
      if (c.satisfied) continue;
      if (!first) os << "; ";
      first = false;
      os << c.name << " violated (" << c.lhs << " vs " << c.rhs << ")";
    }
    return first ? std::string("ok") : os.str();
  }
};

namespace detail {

inline ValidityReport limacon_validity(double R0, double phi_s) {
  ValidityReport r;
  r.conditions.push_back({"R0 > 0", R0 > 0.0, R0, 0.0});
  r.conditions.push_back({"phi_s < 0.5", phi_s < 0.5, phi_s, 0.5});
  return r;
}

inline ValidityReport frame_validity(double a, double b, double c, double U) {
  ValidityReport r;
  const double R_H = b + c;
  const double bound = 9.0 / 8.0 * (1.0 + 0.25 * U);
  r.conditions.push_back({"a > 0", a > 0.0, a, 0.0});
  r.conditions.push_back({"c >= 0", c >= 0.0, c, 0.0});
  r.conditions.push_back({"R_H^2 < 9/8 (1 + 0.25 U)", R_H * R_H < bound, R_H * R_H, bound});
  r.conditions.push_back({"2c < b", 2.0 * c < b, 2.0 * c, b});
  r.conditions.push_back({"b < a + c", b < a + c, b, a + c});
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Model

class MetricModel {
 public:
  static MetricModel model1(double R0, double phi_s) {
    MetricModel m(ModelKind::kModel1);
    m.R0_ = R0;
    m.phi_s_ = phi_s;
    m.require_valid_everywhere();
    return m;
  }

  static MetricModel model2(double a, double b, double c, double theta_hat, double U) {
    MetricModel m(ModelKind::kModel2);
    m.a_ = a;
    m.b_ = b;
    m.c_ = c;
    m.theta_hat_ = normalize_angle(theta_hat);
    m.U_ = U;
    m.require_valid_everywhere();
    return m;
  }

  static MetricModel model2(const rothermel::SpreadParams& p) {
    return model2(p.a, p.b, p.c, p.theta_hat, p.U);
  }

  /// Validity of Models 3/4 is checked pointwise where they are evaluated.
  static MetricModel model3(field::ScalarField R0, field::ScalarField phi_s) {
    MetricModel m(ModelKind::kModel3);
    m.R0_ = std::move(R0);
    m.phi_s_ = std::move(phi_s);
    return m;
  }

  static MetricModel model4(field::ScalarField a, field::ScalarField b, field::ScalarField c,
                            field::ScalarField theta_hat, field::ScalarField U) {
    MetricModel m(ModelKind::kModel4);
    m.a_ = std::move(a);
    m.b_ = std::move(b);
    m.c_ = std::move(c);
    m.theta_hat_ = std::move(theta_hat);
    m.U_ = std::move(U);
    return m;
  }

  ModelKind kind() const { return kind_; }
  bool position_independent() const {
    return kind_ == ModelKind::kModel1 || kind_ == ModelKind::kModel2;
  }
  bool has_wind() const { return kind_ == ModelKind::kModel2 || kind_ == ModelKind::kModel4; }

  LocalMetric<double> at(Point p) const {
    LocalMetric<double> m;
    m.frame = has_wind();
    if (!m.frame) {
      m.R0 = R0_(p.x, p.y);
      m.phi_s = phi_s_(p.x, p.y);
    } else {
      m.a = a_(p.x, p.y);
      m.b = b_(p.x, p.y);
      m.c = c_(p.x, p.y);
      m.theta_hat = theta_hat_(p.x, p.y);
    }
    return m;
  }

  /// Parameters with their positional gradients (central differences of the fields).
  LocalMetric<Jet> jet_at(Point p, double step) const {
    auto jet = [&](const field::ScalarField& f) {
      const auto g = f.gradient(p.x, p.y, step);
      return Jet(f(p.x, p.y), g.dx, g.dy);
    };
    LocalMetric<Jet> m;
    m.frame = has_wind();
    if (!m.frame) {
      m.R0 = jet(R0_);
      m.phi_s = jet(phi_s_);
    } else {
      m.a = jet(a_);
      m.b = jet(b_);
      m.c = jet(c_);
      m.theta_hat = jet(theta_hat_);
    }
    return m;
  }

  double wind_speed_at(Point p) const { return has_wind() ? U_(p.x, p.y) : 0.0; }

  ValidityReport validity_at(Point p) const {
    if (!has_wind()) return detail::limacon_validity(R0_(p.x, p.y), phi_s_(p.x, p.y));
    return detail::frame_validity(a_(p.x, p.y), b_(p.x, p.y), c_(p.x, p.y), U_(p.x, p.y));
  }

  const field::ScalarField& R0() const { return R0_; }
  const field::ScalarField& phi_s() const { return phi_s_; }
  const field::ScalarField& a() const { return a_; }
  const field::ScalarField& b() const { return b_; }
  const field::ScalarField& c() const { return c_; }
  const field::ScalarField& theta_hat() const { return theta_hat_; }
  const field::ScalarField& U() const { return U_; }

  std::string describe() const {
    std::string s = "Model " + std::to_string(model_number(kind_)) + " {";
    if (!has_wind()) {
      s += "R0 = " + R0_.describe() + ", phi_s = " + phi_s_.describe();
    } else {
      s += "a = " + a_.describe() + ", b = " + b_.describe() + ", c = " + c_.describe() +
           ", theta_hat = " + theta_hat_.describe() + ", U = " + U_.describe();
    }
    return s + "}";
  }

 private:
  explicit MetricModel(ModelKind k) : kind_(k) {}

  void require_valid_everywhere() const {
    const ValidityReport r = validity_at({0.0, 0.0});
    if (!r.ok()) throw ModelInvalid("Model " + std::to_string(model_number(kind_)) + ": " + r.summary());
  }

  ModelKind kind_;
  field::ScalarField R0_, phi_s_;
  field::ScalarField a_, b_, c_, theta_hat_, U_;
};

/// Validity conditions at p: phi_s < 1/2 for Models 1/3; R_H^2 < 9/8 (1 + U/4)
/// and 2c < b < a + c for Models 2/4.
inline ValidityReport validity_check(const MetricModel& model, Point p) {
  return model.validity_at(p);
}

inline void require_valid(const MetricModel& model, Point p) {
  if (model.position_independent()) return;  // checked at construction
  const ValidityReport r = model.validity_at(p);
  if (!r.ok()) {
    std::ostringstream os;
    os.precision(10);
    os << "Model " << model_number(model.kind()) << " invalid at (" << p.x << ", " << p.y
       << "): " << r.summary();
    throw ModelInvalid(os.str());
  }
}

// ---------------------------------------------------------------------------
// Metric, unit vectors, fundamental form

inline double indicatrix_speed(const LocalMetric<double>& m, double theta) {
  return polar_speed(m, theta).W;
}

inline double indicatrix_speed(const MetricModel& model, Point p, double theta) {
  require_valid(model, p);
  const double W = indicatrix_speed(model.at(p), theta);
  if (!(W > 0.0)) throw ModelInvalid("indicatrix speed is not positive");
  return W;
}

inline double metric_value(const LocalMetric<double>& m, TangentVector v) {
  if (v.is_zero()) throw UndefinedAtZero();
  return v.norm() / indicatrix_speed(m, v.angle());
}

inline double metric_value(const MetricModel& model, Point p, TangentVector v) {
  if (v.is_zero()) throw UndefinedAtZero();
  return v.norm() / indicatrix_speed(model, p, v.angle());
}

inline TangentVector unit_vector_at_angle(const LocalMetric<double>& m, double theta) {
  return polar(indicatrix_speed(m, theta), theta);
}

inline TangentVector unit_vector_at_angle(const MetricModel& model, Point p, double theta) {
  return polar(indicatrix_speed(model, p, theta), theta);
}

struct FundamentalForm {
  double g11 = 0.0;
  double g12 = 0.0;
  double g22 = 0.0;

  double operator()(int i, int j) const {
    if (i == 0 && j == 0) return g11;
    if (i == 1 && j == 1) return g22;
    return g12;
  }
  double determinant() const { return g11 * g22 - g12 * g12; }
  bool positive_definite() const { return g11 > 0.0 && determinant() > 0.0; }
  std::array<double, 2> eigenvalues() const {
    const double mean = 0.5 * (g11 + g22);
    const double r = std::hypot(0.5 * (g11 - g22), g12);
    return {mean - r, mean + r};
  }
  /// g(u, w) = u^T g w.
  double inner(TangentVector u, TangentVector w) const {
    return u.v1 * (g11 * w.v1 + g12 * w.v2) + u.v2 * (g12 * w.v1 + g22 * w.v2);
  }
};

enum class DerivativeMode {
  kAnalytic,          // closed-form polar Hessian; dual numbers for positional terms
  kFiniteDifference,  // central differences of F^2 in v, and of g in x
};

inline constexpr double kFundamentalFormStep = 1e-5;

namespace detail {

inline FundamentalForm to_form(const Sym2<double>& s) { return {s.g11, s.g12, s.g22}; }

inline FundamentalForm fundamental_form_fd(const LocalMetric<double>& m, TangentVector v,
                                           double step) {
  const double h = step * v.norm();
  auto F2 = [&](double d1, double d2) {
    const double f = metric_value(m, {v.v1 + d1, v.v2 + d2});
    return f * f;
  };
  const double f0 = F2(0, 0);
  FundamentalForm g;
  g.g11 = (F2(h, 0) - 2.0 * f0 + F2(-h, 0)) / (2.0 * h * h);
  g.g22 = (F2(0, h) - 2.0 * f0 + F2(0, -h)) / (2.0 * h * h);
  g.g12 = (F2(h, h) - F2(h, -h) - F2(-h, h) + F2(-h, -h)) / (8.0 * h * h);
  return g;
}

}  // namespace detail

/// g_ij = 1/2 d^2 F^2 / dv^i dv^j without the definiteness check.
inline FundamentalForm fundamental_form_unchecked(const MetricModel& model, Point p,
                                                  TangentVector v,
                                                  DerivativeMode mode = DerivativeMode::kAnalytic,
                                                  double fd_step = kFundamentalFormStep) {
  if (v.is_zero()) throw UndefinedAtZero();
  const LocalMetric<double> m = model.at(p);
  if (mode == DerivativeMode::kFiniteDifference) return detail::fundamental_form_fd(m, v, fd_step);
  return detail::to_form(polar_fundamental_form(m, v.angle()));
}

inline FundamentalForm fundamental_form(const MetricModel& model, Point p, TangentVector v,
                                        DerivativeMode mode = DerivativeMode::kAnalytic,
                                        double fd_step = kFundamentalFormStep) {
  require_valid(model, p);
  const FundamentalForm g = fundamental_form_unchecked(model, p, v, mode, fd_step);
  if (!g.positive_definite()) {
    std::ostringstream os;
    os.precision(10);
    os << "fundamental form is not positive definite at direction " << v.angle()
       << " (eigenvalues " << g.eigenvalues()[0] << ", " << g.eigenvalues()[1] << ")";
    throw ModelInvalid(os.str());
  }
  return g;
}

// ---------------------------------------------------------------------------
// Spray coefficients

struct SprayOptions {
  DerivativeMode mode = DerivativeMode::kAnalytic;
  double x_step = field::kDefaultGradientStep;
  /// Step in v for the finite-difference g inside the finite-difference spray.
  /// Coarser than kFundamentalFormStep so that the x-differences of g are not
  /// swamped by roundoff.
  double v_step = 1e-3;
};

namespace detail {

inline std::array<double, 2> spray_from(const FundamentalForm& g,
                                        const std::array<FundamentalForm, 2>& dg,
                                        TangentVector v) {
  const double det = g.determinant();
  if (!(std::abs(det) > 1e-300) || !std::isfinite(det))
    throw ModelInvalid("fundamental form is singular; spray undefined");
  // A_l = sum_{j,k} d_k g_jl v^j v^k ; B_l = sum_{j,k} d_l g_jk v^j v^k
  const double vv[2] = {v.v1, v.v2};
  double A[2] = {0.0, 0.0};
  double B[2] = {0.0, 0.0};
  for (int l = 0; l < 2; ++l) {
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        A[l] += dg[k](j, l) * vv[j] * vv[k];
        B[l] += dg[l](j, k) * vv[j] * vv[k];
      }
  }
  const double r0 = 2.0 * A[0] - B[0];
  const double r1 = 2.0 * A[1] - B[1];
  // g^{-1} r / 4
  return {0.25 * (g.g22 * r0 - g.g12 * r1) / det, 0.25 * (-g.g12 * r0 + g.g11 * r1) / det};
}

}  // namespace detail

/// G^i(x, v) of the geodesic system x'' + 2 G(x, x') = 0.
inline std::array<double, 2> spray_coefficients(const MetricModel& model, Point p,
                                                TangentVector v, const SprayOptions& opt = {}) {
  if (v.is_zero()) throw UndefinedAtZero();
  if (model.position_independent()) return {0.0, 0.0};
  if (opt.mode == DerivativeMode::kAnalytic) {
    const Sym2<Jet> gj = polar_fundamental_form(model.jet_at(p, opt.x_step), v.angle());
    const FundamentalForm g{gj.g11.v, gj.g12.v, gj.g22.v};
    std::array<FundamentalForm, 2> dg;
    for (int k = 0; k < 2; ++k) dg[k] = {gj.g11.d[k], gj.g12.d[k], gj.g22.d[k]};
    return detail::spray_from(g, dg, v);
  }
  auto g_at = [&](Point q) { return detail::fundamental_form_fd(model.at(q), v, opt.v_step); };
  const double h = opt.x_step;
  const FundamentalForm g = g_at(p);
  std::array<FundamentalForm, 2> dg;
  for (int k = 0; k < 2; ++k) {
    const Point plus = k == 0 ? Point{p.x + h, p.y} : Point{p.x, p.y + h};
    const Point minus = k == 0 ? Point{p.x - h, p.y} : Point{p.x, p.y - h};
    const FundamentalForm gp = g_at(plus);
    const FundamentalForm gm = g_at(minus);
    dg[k] = {(gp.g11 - gm.g11) / (2 * h), (gp.g12 - gm.g12) / (2 * h), (gp.g22 - gm.g22) / (2 * h)};
  }
  return detail::spray_from(g, dg, v);
}

// ---------------------------------------------------------------------------
// Closed-form unit and orthogonality equations per model. The direction
// solver uses g_v(v, u) = 0 by default; these are an alternative rule.
// They do not share roots with g_v(v, u) in general.

namespace closed_form {

/// ||v||^2 - R0 (||v|| + phi_s v1) for Models 1/3.
inline double limacon_unit(double R0, double phi_s, TangentVector v) {
  const double n = v.norm();
  return n * n - R0 * (n + phi_s * v.v1);
}

/// <v,u> - R0 (<v,u>/||v|| + phi_s u1) for Models 1/3.
inline double limacon_orthogonality(double R0, double phi_s, TangentVector v, TangentVector u) {
  const double vu = dot(v, u);
  return vu - R0 * (vu / v.norm() + phi_s * u.v1);
}

namespace detail {
struct FrameTerms {
  double vu, w, wu, norm2, S;
};
inline FrameTerms frame_terms(double a, double b, double theta_hat, TangentVector v,
                              TangentVector u) {
  const TangentVector dir{std::cos(theta_hat), std::sin(theta_hat)};
  FrameTerms t;
  t.vu = dot(v, u);
  t.w = dot(v, dir);
  t.wu = dot(u, dir);
  t.norm2 = v.norm_squared();
  t.S = std::sqrt((a * a - b * b) * t.w * t.w + b * b * t.norm2);
  return t;
}
}  // namespace detail

/// ||v||^2 - ab||v||^2 / S - c <v, v_theta_hat> for Models 2/4.
inline double frame_unit(double a, double b, double c, double theta_hat, TangentVector v) {
  const auto t = detail::frame_terms(a, b, theta_hat, v, v);
  return t.norm2 - a * b * t.norm2 / t.S - c * t.w;
}

/// Model 2 form: (1-ab)<v,u>/||v||^2 + [(a^2-b^2) w wu + b^2 <v,u>]/(ab S) + c wu/(ab).
inline double frame_orthogonality_m2(double a, double b, double c, double theta_hat,
                                     TangentVector v, TangentVector u) {
  const auto t = detail::frame_terms(a, b, theta_hat, v, u);
  const double ab = a * b;
  return (1.0 - ab) * t.vu / t.norm2 + ((a * a - b * b) * t.w * t.wu + b * b * t.vu) / (ab * t.S) +
         c * t.wu / ab;
}

/// Model 4 form: (ab - a^2 b^2)<v,u>/||v||^2 + [(a^2-b^2) w wu + b^2 <v,u>]/S + c wu.
inline double frame_orthogonality_m4(double a, double b, double c, double theta_hat,
                                     TangentVector v, TangentVector u) {
  const auto t = detail::frame_terms(a, b, theta_hat, v, u);
  const double ab = a * b;
  return (ab - ab * ab) * t.vu / t.norm2 + ((a * a - b * b) * t.w * t.wu + b * b * t.vu) / t.S +
         c * t.wu;
}

}  // namespace closed_form

inline double closed_form_unit_residual(const MetricModel& model, Point p, TangentVector v) {
  const LocalMetric<double> m = model.at(p);
  if (!m.frame) return closed_form::limacon_unit(m.R0, m.phi_s, v);
  return closed_form::frame_unit(m.a, m.b, m.c, m.theta_hat, v);
}

inline double closed_form_orthogonality_residual(const MetricModel& model, Point p, TangentVector v,
                                             TangentVector u) {
  const LocalMetric<double> m = model.at(p);
  switch (model.kind()) {
    case ModelKind::kModel1:
    case ModelKind::kModel3: return closed_form::limacon_orthogonality(m.R0, m.phi_s, v, u);
    case ModelKind::kModel2:
      return closed_form::frame_orthogonality_m2(m.a, m.b, m.c, m.theta_hat, v, u);
    case ModelKind::kModel4:
      return closed_form::frame_orthogonality_m4(m.a, m.b, m.c, m.theta_hat, v, u);
  }
  return 0.0;
}

/// g_v(v, u): Finsler orthogonality of u to v (zero when u is tangent to the
/// indicatrix through v / F(v)).
inline double orthogonality_residual(const MetricModel& model, Point p, TangentVector v,
                                     TangentVector u) {
  return fundamental_form_unchecked(model, p, v).inner(v, u);
}

// ---------------------------------------------------------------------------
// Orthogonal unit vectors

enum class OrthogonalityRule {
  kFundamentalForm,  // g_v(v, u) = 0
  kClosedForm,      // the model's closed-form equation
};

struct OrthogonalDirection {
  double theta = 0.0;
  TangentVector v;
};

inline constexpr int kOrthogonalityBrackets = 720;
inline constexpr double kOrthogonalityAngleTolerance = 1e-12;

/// Unit vectors v(theta) = W(theta) (cos theta, sin theta) solving the chosen
/// orthogonality residual against the front tangent u. Roots are isolated on
/// 720 uniform brackets and refined by bisection.
inline std::vector<OrthogonalDirection> orthogonal_directions(
    const MetricModel& model, Point p, TangentVector u,
    OrthogonalityRule rule = OrthogonalityRule::kFundamentalForm) {
  if (u.is_zero()) throw InvalidInput("u", "front tangent must be nonzero");
  require_valid(model, p);
  const LocalMetric<double> m = model.at(p);
  auto residual = [&](double theta) {
    const TangentVector v = unit_vector_at_angle(m, theta);
    if (rule == OrthogonalityRule::kFundamentalForm)
      return detail::to_form(polar_fundamental_form(m, theta)).inner(v, u);
    switch (model.kind()) {
      case ModelKind::kModel1:
      case ModelKind::kModel3: return closed_form::limacon_orthogonality(m.R0, m.phi_s, v, u);
      case ModelKind::kModel2:
        return closed_form::frame_orthogonality_m2(m.a, m.b, m.c, m.theta_hat, v, u);
      case ModelKind::kModel4:
        return closed_form::frame_orthogonality_m4(m.a, m.b, m.c, m.theta_hat, v, u);
    }
    return 0.0;
  };

  constexpr int n = kOrthogonalityBrackets;
  constexpr double step = 2.0 * std::numbers::pi / n;
  std::array<double, n + 1> r{};
  for (int k = 0; k < n; ++k) r[k] = residual(k * step);
  r[n] = r[0];

  std::vector<OrthogonalDirection> roots;
  auto push = [&](double theta) {
    theta = normalize_angle(theta);
    roots.push_back({theta, unit_vector_at_angle(m, theta)});
  };
  for (int k = 0; k < n; ++k) {
    if (r[k] == 0.0) {
      push(k * step);
      continue;
    }
    if (r[k + 1] == 0.0 || (r[k] > 0.0) == (r[k + 1] > 0.0)) continue;
    double lo = k * step, hi = (k + 1) * step, rlo = r[k];
    while (hi - lo > kOrthogonalityAngleTolerance) {
      const double mid = 0.5 * (lo + hi);
      const double rm = residual(mid);
      if (rm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((rm > 0.0) == (rlo > 0.0)) {
        lo = mid;
        rlo = rm;
      } else {
        hi = mid;
      }
    }
    push(0.5 * (lo + hi));
  }
  if (roots.empty()) {
    std::ostringstream os;
    os.precision(10);
    os << "no orthogonal direction: residual has no sign change over " << n
       << " samples at (" << p.x << ", " << p.y << ") for u = (" << u.v1 << ", " << u.v2 << ")";
    throw NoOrthogonalDirection(os.str());
  }
  return roots;
}

inline std::vector<TangentVector> orthogonal_unit_vectors(
    const MetricModel& model, Point p, TangentVector u,
    OrthogonalityRule rule = OrthogonalityRule::kFundamentalForm) {
  std::vector<TangentVector> out;
  for (const auto& d : orthogonal_directions(model, p, u, rule)) out.push_back(d.v);
  return out;
}

/// Minimum over sampled directions of the polar convexity measure
/// W^2 + 2 W'^2 - W W''; negative means the indicatrix is not convex there.
inline double indicatrix_convexity(const LocalMetric<double>& m, int samples = 720) {
  double lowest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const auto s = polar_speed(m, 2.0 * std::numbers::pi * k / samples);
    lowest = std::min(lowest, s.W * s.W + 2.0 * s.dW * s.dW - s.W * s.d2W);
  }
  return lowest;
}

}  // namespace wildfire
