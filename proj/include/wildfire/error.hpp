#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wildfire {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates a documented precondition. `field()` names the offender.
class InvalidInput : public Error {
 public:
  InvalidInput(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// R_H + R_B vanished, so the frame parameter a is undefined.
class DegenerateFrame : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
      : Error(format(offset, expected, found)), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string format(std::size_t offset, const std::vector<std::string>& expected,
                            const std::string& found) {
    std::string msg = "syntax error at byte " + std::to_string(offset) + ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    return msg + ", found " + found;
  }

  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(std::size_t offset, std::string name, std::vector<std::string> allowed)
      : Error(format(offset, name, allowed)),
        offset_(offset),
        name_(std::move(name)),
        allowed_(std::move(allowed)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& allowed() const noexcept { return allowed_; }

 private:
  static std::string format(std::size_t offset, const std::string& name,
                            const std::vector<std::string>& allowed) {
    std::string msg = "unknown identifier '" + name + "' at byte " + std::to_string(offset) +
                      "; allowed names:";
    for (const auto& a : allowed) msg += " " + a;
    return msg;
  }

  std::size_t offset_;
  std::string name_;
  std::vector<std::string> allowed_;
};

/// Domain violation while evaluating a field expression.
class EvaluationError : public Error {
 public:
  EvaluationError(std::string subexpression, const std::string& what)
      : Error(what + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

/// A metric model fails its validity conditions at some point.
class ModelInvalid : public Error {
 public:
  using Error::Error;
};

/// The metric was asked for F at the zero vector.
class UndefinedAtZero : public Error {
 public:
  UndefinedAtZero() : Error("Finsler metric is undefined at the zero vector") {}
};

class NoOrthogonalDirection : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace wildfire
