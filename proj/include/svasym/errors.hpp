#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace svasym {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the state space E0 of the volatility factor.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The operation does not apply to this parameter set (e.g. no boundary for beta = 0).
class NotApplicable : public Error {
 public:
  using Error::Error;
};

/// The truncation window could not capture the required mass.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Two tables that must share a grid do not.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// The Poisson right-hand side is not centered under the invariant law.
class CenteringError : public Error {
 public:
  using Error::Error;
};

/// A sampled Hamiltonian violates convexity beyond its error estimates.
class ConvexityError : public Error {
 public:
  using Error::Error;
};

/// A query falls outside the range where a curve is resolved.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A quantity is below the numerical noise floor.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// The time step is too coarse for the fast factor.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// Model parameters fail Assumption-1 style checks where a hard failure is required.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownKeyError : public Error {
 public:
  explicit UnknownKeyError(std::string key)
      : Error("unknown key '" + key + "'"), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace svasym
