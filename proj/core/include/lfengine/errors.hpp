#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lfengine {

/// Base error type. Carries a short machine-readable category that the CLI
/// maps to a process exit code.
class Error : public std::runtime_error {
public:
  Error(std::string category, int exit_code, const std::string& message)
      : std::runtime_error(message),
        category_(std::move(category)),
        exit_code_(exit_code) {}

  const std::string& category() const noexcept { return category_; }
  int exit_code() const noexcept { return exit_code_; }

private:
  std::string category_;
  int exit_code_;
};

/// Malformed or semantically invalid run configuration.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& m) : Error("config", 2, m) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  explicit DomainError(const std::string& m) : Error("domain", 6, m) {}
};

/// Caller violated an API precondition.
class ContractError : public Error {
public:
  explicit ContractError(const std::string& m) : Error("contract", 6, m) {}
};

/// Frequency does not fall inside any WDM channel band.
class FrequencyLookupError : public Error {
public:
  explicit FrequencyLookupError(const std::string& m)
      : Error("frequency-lookup", 6, m) {}
};

/// ODE step produced a negative power; the step size is too coarse.
class StepSizeError : public Error {
public:
  explicit StepSizeError(const std::string& m) : Error("step-size", 3, m) {}
};

/// An iterative method (shooting) failed to converge.
class IterativeFailureError : public Error {
public:
  IterativeFailureError(const std::string& m, double final_residual)
      : Error("iterative-failure", 3, m), final_residual_(final_residual) {}

  double final_residual() const noexcept { return final_residual_; }

private:
  double final_residual_;
};

/// The least-squares normal equations are numerically unreliable.
class FitDegeneracyError : public Error {
public:
  explicit FitDegeneracyError(const std::string& m)
      : Error("fit-degeneracy", 4, m) {}
};

/// The validation quadrature exceeded its resolution budget.
class OracleResolutionError : public Error {
public:
  explicit OracleResolutionError(const std::string& m)
      : Error("oracle-resolution", 5, m) {}
};

/// Island quadrature refinement did not reach the requested tolerance.
class QuadratureToleranceError : public Error {
public:
  explicit QuadratureToleranceError(const std::string& m)
      : Error("quadrature-tolerance", 5, m) {}
};

/// Filesystem failure while writing run artifacts.
class IoError : public Error {
public:
  explicit IoError(const std::string& m) : Error("io", 7, m) {}
};

}  // namespace lfengine
