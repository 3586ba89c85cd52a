#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phimi {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A real argument fell outside the domain of a divergence function.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double value, std::string interval)
      : Error(what + ": " + std::to_string(value) + " not in " + interval),
        value_(value),
        interval_(std::move(interval)) {}

  double value() const noexcept { return value_; }
  const std::string& interval() const noexcept { return interval_; }

 private:
  double value_;
  std::string interval_;
};

/// phi'(h_theta) left the domain of the conjugate; theta is infeasible.
class ConjugateDomainError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class SupportError : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class OptimFailure : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class RouteMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class MissingValueError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace phimi
