#pragma once

#include <stdexcept>
#include <string>

namespace armarket {

// Root of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A time step lies outside the horizon of a mean schedule.
class ScheduleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A reference distribution handed to a goodness-of-fit routine is not a CDF.
class ReferenceError : public Error {
 public:
  using Error::Error;
};

// A quadrature grid is too coarse to hold the normalization invariant.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent configuration. `field` is the dotted path of the
// offending entry when one is known.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)),
        detail_(what) {}
  explicit ConfigError(const std::string& what) : ConfigError("", what) {}

  const std::string& field() const noexcept { return field_; }
  // The message without the field prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string field_;
  std::string detail_;
};

// Two artifacts cannot be compared (different sample domains, missing data).
class ComparisonError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace armarket
