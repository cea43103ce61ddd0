#pragma once

// Scalar fields over the plane: constants, expressions in x and y, and
// bilinearly interpolated grids.
//
// Expression grammar (closed; no user functions or extra variables):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'x' | 'y' | func '(' expr ')' | '(' expr ')'
//   func    := cos | sin | tan | exp | sqrt | abs
//
// '^' binds tightest and is right-associative, so -x^2 == -(x^2) and
// 2^3^2 == 2^(3^2).

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "wildfire/error.hpp"

namespace wildfire::field {

enum class Function : std::uint8_t { kCos, kSin, kTan, kExp, kSqrt, kAbs };
enum class BinaryOp : std::uint8_t { kAdd, kSub, kMul, kDiv, kPow };
enum class Variable : std::uint8_t { kX, kY };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Literal {
  double value = 0.0;
};
struct Negate {
  NodePtr operand;
};
struct Binary {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};
struct Call {
  Function fn;
  NodePtr arg;
};

struct Node {
  std::variant<Literal, Variable, Negate, Binary, Call> kind;
};

inline constexpr std::array<std::string_view, 6> kFunctionNames = {"cos", "sin", "tan",
                                                                   "exp", "sqrt", "abs"};

inline std::string_view name(Function f) { return kFunctionNames[static_cast<std::size_t>(f)]; }

inline char symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return '+';
    case BinaryOp::kSub: return '-';
    case BinaryOp::kMul: return '*';
    case BinaryOp::kDiv: return '/';
    case BinaryOp::kPow: return '^';
  }
  return '?';
}

inline std::vector<std::string> allowed_identifiers() {
  std::vector<std::string> names = {"x", "y"};
  for (auto n : kFunctionNames) names.emplace_back(n);
  return names;
}

// ---------------------------------------------------------------------------
// Structural comparison and printing

inline bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind.index() != b.kind.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.kind);
        if constexpr (std::is_same_v<T, Literal>) {
          return lhs.value == rhs.value;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return lhs == rhs;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return structurally_equal(*lhs.operand, *rhs.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return lhs.op == rhs.op && structurally_equal(*lhs.lhs, *rhs.lhs) &&
                 structurally_equal(*lhs.rhs, *rhs.rhs);
        } else {
          return lhs.fn == rhs.fn && structurally_equal(*lhs.arg, *rhs.arg);
        }
      },
      a.kind);
}

namespace detail {

inline int precedence(const Node& n) {
  if (const auto* b = std::get_if<Binary>(&n.kind)) {
    switch (b->op) {
      case BinaryOp::kAdd:
      case BinaryOp::kSub: return 1;
      case BinaryOp::kMul:
      case BinaryOp::kDiv: return 2;
      case BinaryOp::kPow: return 4;
    }
  }
  if (std::holds_alternative<Negate>(n.kind)) return 3;
  if (const auto* l = std::get_if<Literal>(&n.kind); l && std::signbit(l->value)) return 3;
  return 5;
}

inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), end);
  return s;
}

inline void print(const Node& n, std::string& out);

inline void print_wrapped(const Node& n, bool parens, std::string& out) {
  if (parens) out += '(';
  print(n, out);
  if (parens) out += ')';
}

inline void print(const Node& n, std::string& out) {
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Literal>) {
          if (std::signbit(k.value)) {
            out += '-';
            out += format_number(-k.value);
          } else {
            out += format_number(k.value);
          }
        } else if constexpr (std::is_same_v<T, Variable>) {
          out += k == Variable::kX ? 'x' : 'y';
        } else if constexpr (std::is_same_v<T, Negate>) {
          out += '-';
          print_wrapped(*k.operand, precedence(*k.operand) < 3, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          const int p = precedence(n);
          if (k.op == BinaryOp::kPow) {
            print_wrapped(*k.lhs, precedence(*k.lhs) <= 4, out);
            out += '^';
            print_wrapped(*k.rhs, precedence(*k.rhs) < 3, out);
          } else {
            print_wrapped(*k.lhs, precedence(*k.lhs) < p, out);
            out += ' ';
            out += symbol(k.op);
            out += ' ';
            print_wrapped(*k.rhs, precedence(*k.rhs) <= p, out);
          }
        } else {
          out += name(k.fn);
          out += '(';
          print(*k.arg, out);
          out += ')';
        }
      },
      n.kind);
}

}  // namespace detail

inline std::string to_string(const Node& n) {
  std::string out;
  detail::print(n, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    skip_space();
    if (pos_ == text_.size()) fail({"expression"});
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size()) fail({"operator", "end of input"});
    return root;
  }

 private:
  static NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'"
                                            : std::string("end of input");
    throw SyntaxError(pos_, std::move(expected), found);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxDepth) parser.fail({"less deeply nested expression"});
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  NodePtr expr() {
    DepthGuard guard(*this);
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make({Binary{BinaryOp::kAdd, lhs, term()}});
      } else if (accept('-')) {
        lhs = make({Binary{BinaryOp::kSub, lhs, term()}});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make({Binary{BinaryOp::kMul, lhs, unary()}});
      } else if (accept('/')) {
        lhs = make({Binary{BinaryOp::kDiv, lhs, unary()}});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    DepthGuard guard(*this);
    if (accept('-')) return make({Negate{unary()}});
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make({Binary{BinaryOp::kPow, base, unary()}});
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail({"number", "identifier", "'('", "'-'"});
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail({"')'", "operator"});
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail({"number", "identifier", "'('", "'-'"});
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      pos_ = start;
      fail({"number"});
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = save + 1;
        fail({"exponent digits"});
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(value)) {
      pos_ = start;
      fail({"finite number"});
    }
    return make({Literal{value}});
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_'))
      ++pos_;
    const std::string_view id = text_.substr(start, pos_ - start);
    if (id == "x") return make({Variable::kX});
    if (id == "y") return make({Variable::kY});
    for (std::size_t i = 0; i < kFunctionNames.size(); ++i) {
      if (id == kFunctionNames[i]) {
        if (!accept('(')) fail({"'('"});
        NodePtr arg = expr();
        if (!accept(')')) fail({"')'", "operator"});
        return make({Call{static_cast<Function>(i), arg}});
      }
    }
    throw UnknownIdentifier(start, std::string(id), allowed_identifiers());
  }

  static constexpr int kMaxDepth = 200;

  std::string_view text_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

// Postfix program compiled from the tree; evaluation walks it with a value stack.
struct Instr {
  enum class Code : std::uint8_t { kPush, kX, kY, kNeg, kAdd, kSub, kMul, kDiv, kPow, kCall };
  Code code;
  Function fn = Function::kCos;
  double value = 0.0;
  const Node* node = nullptr;
};

inline void compile(const Node& n, std::vector<Instr>& prog, std::size_t depth,
                    std::size_t& max_depth) {
  max_depth = std::max(max_depth, depth + 1);
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Literal>) {
          prog.push_back({Instr::Code::kPush, Function::kCos, k.value, &n});
        } else if constexpr (std::is_same_v<T, Variable>) {
          prog.push_back({k == Variable::kX ? Instr::Code::kX : Instr::Code::kY, Function::kCos,
                          0.0, &n});
        } else if constexpr (std::is_same_v<T, Negate>) {
          compile(*k.operand, prog, depth, max_depth);
          prog.push_back({Instr::Code::kNeg, Function::kCos, 0.0, &n});
        } else if constexpr (std::is_same_v<T, Binary>) {
          compile(*k.lhs, prog, depth, max_depth);
          compile(*k.rhs, prog, depth + 1, max_depth);
          constexpr Instr::Code codes[] = {Instr::Code::kAdd, Instr::Code::kSub, Instr::Code::kMul,
                                           Instr::Code::kDiv, Instr::Code::kPow};
          prog.push_back({codes[static_cast<int>(k.op)], Function::kCos, 0.0, &n});
        } else {
          compile(*k.arg, prog, depth, max_depth);
          prog.push_back({Instr::Code::kCall, k.fn, 0.0, &n});
        }
      },
      n.kind);
}

inline std::optional<double> literal_value(const NodePtr& n) {
  if (const auto* l = std::get_if<Literal>(&n->kind)) return l->value;
  return std::nullopt;
}

inline bool mentions_variable(const Node& n) {
  return std::visit(
      [](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return false;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return true;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return mentions_variable(*k.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return mentions_variable(*k.lhs) || mentions_variable(*k.rhs);
        } else {
          return mentions_variable(*k.arg);
        }
      },
      n.kind);
}

}  // namespace detail

/// An immutable, parsed expression of the plane coordinates x and y.
class Expr {
 public:
  static constexpr std::size_t kMaxLength = 10000;

  static Expr parse(std::string_view text) {
    if (text.empty()) throw SyntaxError(0, {"expression"}, "end of input");
    if (text.size() > kMaxLength) throw SyntaxError(kMaxLength, {"end of input"}, "more text");
    return Expr(detail::Parser(text).parse());
  }

  static Expr constant(double v) { return Expr(make({Literal{v}})); }
  static Expr x() { return Expr(make({Variable::kX})); }
  static Expr y() { return Expr(make({Variable::kY})); }

  explicit Expr(NodePtr root) : root_(std::move(root)) {
    detail::compile(*root_, program_, 0, stack_depth_);
  }

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  std::string str() const { return to_string(*root_); }

  std::optional<double> constant_value() const { return detail::literal_value(root_); }

  bool structurally_equals(const Expr& other) const {
    return structurally_equal(*root_, *other.root_);
  }

  /// Evaluates at (x, y). Throws EvaluationError on a domain violation.
  double operator()(double x, double y) const {
    using Code = detail::Instr::Code;
    // Small expressions dominate; avoid heap traffic for them.
    std::array<double, 32> small{};
    std::vector<double> big;
    double* stack = small.data();
    if (stack_depth_ > small.size()) {
      big.resize(stack_depth_);
      stack = big.data();
    }
    std::size_t top = 0;
    for (const auto& in : program_) {
      switch (in.code) {
        case Code::kPush: stack[top++] = in.value; break;
        case Code::kX: stack[top++] = x; break;
        case Code::kY: stack[top++] = y; break;
        case Code::kNeg: stack[top - 1] = -stack[top - 1]; break;
        case Code::kCall: stack[top - 1] = call(in, stack[top - 1]); break;
        default: {
          const double rhs = stack[--top];
          double& lhs = stack[top - 1];
          lhs = binary(in, lhs, rhs);
        }
      }
    }
    return stack[0];
  }

  friend Expr operator+(const Expr& a, const Expr& b) { return fold(BinaryOp::kAdd, a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return fold(BinaryOp::kSub, a, b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return fold(BinaryOp::kMul, a, b); }
  friend Expr operator/(const Expr& a, const Expr& b) { return fold(BinaryOp::kDiv, a, b); }
  friend Expr pow(const Expr& a, const Expr& b) { return fold(BinaryOp::kPow, a, b); }
  friend Expr operator-(const Expr& a) {
    if (auto v = a.constant_value()) return constant(-*v);
    return Expr(make({Negate{a.root_}}));
  }
  friend Expr call(Function fn, const Expr& a) {
    Expr e(make({Call{fn, a.root_}}));
    if (a.constant_value()) {
      const double v = e(0.0, 0.0);
      return constant(v);
    }
    return e;
  }

 private:
  static NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

  static Expr fold(BinaryOp op, const Expr& a, const Expr& b) {
    Expr e(make({Binary{op, a.root_, b.root_}}));
    if (a.constant_value() && b.constant_value()) {
      try {
        return constant(e(0.0, 0.0));
      } catch (const EvaluationError&) {
        return e;  // keep the tree so the error surfaces at evaluation time
      }
    }
    return e;
  }

  [[noreturn]] static void domain_error(const detail::Instr& in, const char* what) {
    throw EvaluationError(to_string(*in.node), what);
  }

  static double checked(const detail::Instr& in, double v) {
    if (!std::isfinite(v)) domain_error(in, "non-finite result");
    return v;
  }

  static double binary(const detail::Instr& in, double a, double b) {
    using Code = detail::Instr::Code;
    switch (in.code) {
      case Code::kAdd: return checked(in, a + b);
      case Code::kSub: return checked(in, a - b);
      case Code::kMul: return checked(in, a * b);
      case Code::kDiv:
        if (b == 0.0) domain_error(in, "division by zero");
        return checked(in, a / b);
      case Code::kPow: return checked(in, std::pow(a, b));
      default: return 0.0;
    }
  }

  static double call(const detail::Instr& in, double a) {
    switch (in.fn) {
      case Function::kCos: return std::cos(a);
      case Function::kSin: return std::sin(a);
      case Function::kTan: return checked(in, std::tan(a));
      case Function::kExp: return checked(in, std::exp(a));
      case Function::kSqrt:
        if (a < 0.0) domain_error(in, "square root of a negative value");
        return std::sqrt(a);
      case Function::kAbs: return std::abs(a);
    }
    return 0.0;
  }

  NodePtr root_;
  std::vector<detail::Instr> program_;
  std::size_t stack_depth_ = 0;
};

inline Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
inline Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
inline Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
inline Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
inline Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
inline Expr operator/(const Expr& a, double b) { return a / Expr::constant(b); }
inline Expr operator/(double a, const Expr& b) { return Expr::constant(a) / b; }

// ---------------------------------------------------------------------------
// Scalar fields

/// Uniform rectangular samples, row-major in y: values[j * nx + i] is the
/// sample at (x0 + i*dx, y0 + j*dy).
struct Grid {
  double x0 = 0.0;
  double y0 = 0.0;
  double dx = 1.0;
  double dy = 1.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> values;

  void validate() const {
    if (!(dx > 0.0) || !(dy > 0.0)) throw InvalidInput("grid", "spacing must be strictly positive");
    if (nx < 2 || ny < 2) throw InvalidInput("grid", "needs at least 2 samples per axis");
    if (values.size() != nx * ny) throw InvalidInput("grid", "values.size() != nx * ny");
  }

  /// Bilinear interpolation; queries outside the grid clamp to the boundary.
  double operator()(double x, double y) const {
    const double fx = std::clamp((x - x0) / dx, 0.0, static_cast<double>(nx - 1));
    const double fy = std::clamp((y - y0) / dy, 0.0, static_cast<double>(ny - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(fx), nx - 2);
    const std::size_t j = std::min(static_cast<std::size_t>(fy), ny - 2);
    const double tx = fx - static_cast<double>(i);
    const double ty = fy - static_cast<double>(j);
    const double v00 = values[j * nx + i];
    const double v10 = values[j * nx + i + 1];
    const double v01 = values[(j + 1) * nx + i];
    const double v11 = values[(j + 1) * nx + i + 1];
    return (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
  }
};

struct Gradient {
  double dx = 0.0;
  double dy = 0.0;
};

inline constexpr double kDefaultGradientStep = 1e-4;

class ScalarField {
 public:
  ScalarField() : repr_(0.0) {}
  ScalarField(double constant) : repr_(constant) {}  // NOLINT: implicit by design of the API
  // Expressions free of x and y collapse to their value unless evaluating
  // them fails, in which case the error surfaces at evaluation time.
  ScalarField(Expr e) {  // NOLINT
    repr_ = e;
    if (auto v = e.constant_value()) {
      repr_ = *v;
    } else if (!detail::mentions_variable(e.root())) {
      try {
        repr_ = e(0.0, 0.0);
      } catch (const EvaluationError&) {
      }
    }
  }
  ScalarField(Grid g) : repr_((g.validate(), std::move(g))) {}  // NOLINT

  static ScalarField parse(std::string_view text) { return ScalarField(Expr::parse(text)); }

  bool is_constant() const { return std::holds_alternative<double>(repr_); }
  std::optional<double> constant_value() const {
    if (const auto* c = std::get_if<double>(&repr_)) return *c;
    return std::nullopt;
  }
  const Expr* expr() const { return std::get_if<Expr>(&repr_); }
  const Grid* grid() const { return std::get_if<Grid>(&repr_); }

  double operator()(double x, double y) const {
    return std::visit(
        [&](const auto& r) -> double {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, double>) {
            return r;
          } else {
            return r(x, y);
          }
        },
        repr_);
  }

  /// Central differences; O(step^2) truncation error for smooth fields.
  Gradient gradient(double x, double y, double step = kDefaultGradientStep) const {
    if (is_constant()) return {};
    if (!(step > 0.0)) throw InvalidInput("step", "finite-difference step must be positive");
    const auto& f = *this;
    return {(f(x + step, y) - f(x - step, y)) / (2.0 * step),
            (f(x, y + step) - f(x, y - step)) / (2.0 * step)};
  }

  std::string describe() const {
    if (const auto* c = std::get_if<double>(&repr_)) return detail::format_number(*c);
    if (const auto* e = std::get_if<Expr>(&repr_)) return e->str();
    const auto& g = std::get<Grid>(repr_);
    return "grid " + std::to_string(g.nx) + "x" + std::to_string(g.ny);
  }

  /// Expression view of a constant or expression field (grids have none).
  std::optional<Expr> as_expr() const {
    if (const auto* c = std::get_if<double>(&repr_)) return Expr::constant(*c);
    if (const auto* e = std::get_if<Expr>(&repr_)) return *e;
    return std::nullopt;
  }

 private:
  std::variant<double, Expr, Grid> repr_;
};

inline Grid sample_to_grid(const ScalarField& f, double x0, double y0, double dx, double dy,
                           std::size_t nx, std::size_t ny) {
  Grid g{x0, y0, dx, dy, nx, ny, {}};
  g.values.resize(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      g.values[j * nx + i] = f(x0 + static_cast<double>(i) * dx, y0 + static_cast<double>(j) * dy);
  g.validate();
  return g;
}

/// Eval of a field at (x, y); mirrors the operation name used in the docs.
inline double eval(const ScalarField& f, double x, double y) { return f(x, y); }

inline Gradient eval_gradient(const ScalarField& f, double x, double y,
                              double step = kDefaultGradientStep) {
  return f.gradient(x, y, step);
}

}  // namespace wildfire::field
