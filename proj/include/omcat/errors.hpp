#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace omcat {

// Numbered process exit codes used by the CLI.
enum class ErrorKind {
  invalid_dimension,
  invalid_argument,
  truncation_overflow,
  vanishing_herald,
  negligible_outcome,
  numerical_consistency,
  bistability,
  no_steady_state,
  grid_coverage,
  config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

  // 0 success, 2 config error, 3 numerical-consistency error, 4 truncation-overflow.
  int exit_code() const {
    switch (kind_) {
      case ErrorKind::config:
        return 2;
      case ErrorKind::truncation_overflow:
        return 4;
      default:
        return 3;
    }
  }

 private:
  ErrorKind kind_;
};

struct InvalidDimensionError : Error {
  explicit InvalidDimensionError(const std::string& w) : Error(ErrorKind::invalid_dimension, w) {}
};
struct InvalidArgumentError : Error {
  explicit InvalidArgumentError(const std::string& w) : Error(ErrorKind::invalid_argument, w) {}
};
struct TruncationOverflowError : Error {
  explicit TruncationOverflowError(const std::string& w) : Error(ErrorKind::truncation_overflow, w) {}
};
struct VanishingHeraldError : Error {
  explicit VanishingHeraldError(const std::string& w) : Error(ErrorKind::vanishing_herald, w) {}
};
struct NegligibleOutcomeError : Error {
  explicit NegligibleOutcomeError(const std::string& w) : Error(ErrorKind::negligible_outcome, w) {}
};
struct NumericalConsistencyError : Error {
  explicit NumericalConsistencyError(const std::string& w) : Error(ErrorKind::numerical_consistency, w) {}
};
struct BistabilityError : Error {
  BistabilityError(const std::string& w, std::vector<double> residual_history)
      : Error(ErrorKind::bistability, w), residuals(std::move(residual_history)) {}
  std::vector<double> residuals;  // one entry per fixed-point iterate
};
struct NoSteadyStateError : Error {
  explicit NoSteadyStateError(const std::string& w) : Error(ErrorKind::no_steady_state, w) {}
};
struct GridCoverageError : Error {
  explicit GridCoverageError(const std::string& w) : Error(ErrorKind::grid_coverage, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};

}  // namespace omcat
