#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace betamoments {

/// Argument outside the region where a formula, integral or density is defined.
/// The CLI maps this to exit code 3.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Gamma/Barnes-G argument at a pole (nonpositive integer).
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Point outside the support of an ensemble density.
class SupportError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Coinciding coordinates where strictly ordered input is required.
class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Adaptive quadrature stopped before reaching the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : std::runtime_error(what + " (achieved error estimate " + format_error(achieved_error) + ")"),
        achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  static std::string format_error(double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", e);
    return buf;
  }

  double achieved_error_;
};

namespace detail {

inline void require(bool condition, const char* message) {
  if (!condition) throw DomainError(message);
}

}  // namespace detail
}  // namespace betamoments
