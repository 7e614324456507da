#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace planecell {

/// Base class for all planecell errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameter combination (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A right-hand side whose mean cannot be removed: the Poisson problem or a
/// Lindstedt order is unsolvable (resonance obstruction).
class CompatibilityError : public Error {
 public:
  CompatibilityError(const std::string& msg, double mean_value)
      : Error(msg), mean(mean_value) {}
  double mean = 0.0;
};

/// Requested translate does not land on grid nodes.
class MisalignmentError : public Error {
 public:
  using Error::Error;
};

/// A resonance function has no sign change on the scan grid.
class NoRootError : public Error {
 public:
  NoRootError(const std::string& msg, double min_value, double max_value)
      : Error(msg), min_val(min_value), max_val(max_value) {}
  double min_val = 0.0;
  double max_val = 0.0;
};

/// The twist integral vanishes at a resonance root; the series hierarchy
/// cannot be continued from that root.
class DegenerateTwistError : public Error {
 public:
  DegenerateTwistError(const std::string& msg, double twist_value)
      : Error(msg), twist(twist_value) {}
  double twist = 0.0;
};

/// An inner Krylov solve stalled; carries the smallest Rayleigh quotient
/// observed as an estimate of the offending eigenvalue.
class LinearSolveStallError : public Error {
 public:
  LinearSolveStallError(const std::string& msg, double ritz)
      : Error(msg), min_ritz_estimate(ritz) {}
  double min_ritz_estimate = 0.0;
};

/// The strip used for a line quadrature is too short: the integrand has not
/// decayed below tolerance at the endpoints.
class TailError : public Error {
 public:
  TailError(const std::string& msg, double endpoint_value)
      : Error(msg), endpoint(endpoint_value) {}
  double endpoint = 0.0;
};

/// A power-law fit was asked to take the log of a nonpositive jump.
class InvalidJumpError : public Error {
 public:
  InvalidJumpError(const std::string& msg, std::vector<double> offending)
      : Error(msg), offending_epsilons(std::move(offending)) {}
  std::vector<double> offending_epsilons;
};

}  // namespace planecell
