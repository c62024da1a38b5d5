#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a model or objective (x <= 0, params outside Θ, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFamilyError : public Error {
 public:
  using Error::Error;
};

/// Closed-form estimator undefined for this sample (e.g. all observations tied).
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

/// A linear system or moment ratio in a closed-form estimator is singular.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

class SampleTooSmallError : public Error {
 public:
  using Error::Error;
};

class InvalidBoundsError : public Error {
 public:
  using Error::Error;
};

class NoSignChangeError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : Error(what), achieved_tolerance_(achieved) {}
  double achieved_tolerance() const noexcept { return achieved_tolerance_; }

 private:
  double achieved_tolerance_;
};

/// Malformed experiment configuration. Line is 1-based, 0 when not applicable.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0, std::string field = {})
      : Error(what), line_(line), field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Malformed observation file. Line is 1-based.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace smde
