#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace lacldp {

// Base for every error raised by the library. `kind()` is a stable
// machine-readable tag used by the CLI when reporting failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

// Malformed input description: bad JSON, unknown builtin, unknown key.
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

// Precondition violated by a numeric argument (q < 2, empty grid, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "argument"; }
};

// A computation exceeded its size budget (quadrature panels, enumeration).
class BudgetError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "budget"; }
};

// Iterative method stopped without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  const char* kind() const noexcept override { return "convergence"; }
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// The requested identity is only valid under a hypothesis that failed.
class RefusalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "refused"; }
};

// A convex-only operation received non-convex samples.
class NonConvexError : public Error {
 public:
  NonConvexError(const std::string& what, double left, double middle, double right)
      : Error(what), triple_{left, middle, right} {}
  const char* kind() const noexcept override { return "non_convex"; }
  // Grid points of the violating triple.
  const std::array<double, 3>& triple() const noexcept { return triple_; }

 private:
  std::array<double, 3> triple_;
};

}  // namespace lacldp
