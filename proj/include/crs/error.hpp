#pragma once

#include <stdexcept>
#include <string>

namespace crs {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scenario or rate field is non-finite or outside its physical range.
class ParameterError : public Error {
 public:
  ParameterError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// An argument lies outside the domain of an operation (e.g. power above Pmax).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The requested arrival rate is at or beyond the stability region.
class InstabilityError : public Error {
 public:
  InstabilityError(double lambda_star, const std::string& what)
      : Error(what), lambda_star_(lambda_star) {}

  double lambda_star() const noexcept { return lambda_star_; }

 private:
  double lambda_star_;
};

// A numeric solver failed to meet its tolerance.
class NumericError : public Error {
 public:
  NumericError(double residual, const std::string& what)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Configuration file could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace crs
