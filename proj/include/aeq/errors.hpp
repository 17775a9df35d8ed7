#pragma once

#include <stdexcept>
#include <string>

namespace aeq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Raised when the adaptive integrator cannot reach the end of its span.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double last_t)
      : Error(what), last_t_(last_t) {}
  double last_t() const noexcept { return last_t_; }
  const char* kind() const noexcept override { return "integration_failure"; }

 private:
  double last_t_;
};

/// Scenario or argument problem, with an optional 1-based source location.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what, int line = 0, int column = 0)
      : Error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) + ": " + what : what),
        message_(what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }
  const char* kind() const noexcept override { return "input_error"; }

 private:
  std::string message_;
  int line_;
  int column_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical_error"; }
};

class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition_failed"; }
};

/// The two half-axis constructions of a two-sided Ψ disagree.
class GlueMismatch : public NumericalError {
 public:
  GlueMismatch(const std::string& what, double mismatch, double at_t)
      : NumericalError(what), mismatch_(mismatch), at_t_(at_t) {}
  double mismatch() const noexcept { return mismatch_; }
  double at_t() const noexcept { return at_t_; }
  const char* kind() const noexcept override { return "glue_mismatch"; }

 private:
  double mismatch_;
  double at_t_;
};

}  // namespace aeq
