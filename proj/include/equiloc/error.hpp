#pragma once

#include <stdexcept>
#include <string>

namespace equiloc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two operands live on different coordinate charts.
class ChartMismatch : public Error {
 public:
  ChartMismatch(const std::string& a, const std::string& b)
      : Error("chart mismatch: '" + a + "' vs '" + b + "'") {}
};

/// Metric (or another matrix that must be inverted) is singular at a point.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// Input outside an operation's domain (odd Pfaffian size, asymmetric input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A declared property failed numerical validation. Carries the residual name.
class ValidationError : public Error {
 public:
  ValidationError(std::string residual, double value, double tolerance, const std::string& detail = {})
      : Error("validation failed: " + residual + " = " + std::to_string(value) + " (tolerance " +
              std::to_string(tolerance) + ")" + (detail.empty() ? "" : ": " + detail)),
        residual_(std::move(residual)),
        value_(value) {}

  const std::string& residual() const noexcept { return residual_; }
  double value() const noexcept { return value_; }

 private:
  std::string residual_;
  double value_;
};

/// Malformed scenario file or expression.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace equiloc
