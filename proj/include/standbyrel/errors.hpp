#pragma once

#include <stdexcept>
#include <string>

namespace standbyrel {

/// Malformed input: bad rate, bad distribution literal, negative time, bad grid.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numeric certificate contradicted an analytic claim (implication chain,
/// aging class). Maps to CLI exit status 3.
class ConsistencyError : public std::runtime_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual estimate " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Numerical Laplace inversion produced a value outside the admissible band.
class AccuracyError : public std::runtime_error {
 public:
  explicit AccuracyError(const std::string& what) : std::runtime_error(what) {}
};

/// Mean-time-to-failure system is singular: both repairs a.s. beat the lifetimes.
class DivergentMttfError : public std::runtime_error {
 public:
  explicit DivergentMttfError(const std::string& what) : std::runtime_error(what) {}
};

/// Volterra march lost monotonicity; carries the step that should be tried next.
class RefineStepError : public std::runtime_error {
 public:
  RefineStepError(const std::string& what, double suggested_step)
      : std::runtime_error(what), suggested_step_(suggested_step) {}
  double suggested_step() const noexcept { return suggested_step_; }

 private:
  double suggested_step_;
};

/// A relation was requested that the supplied lifetime laws cannot support.
class UnsupportedRelationError : public std::invalid_argument {
 public:
  explicit UnsupportedRelationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Simulation aborted (non-finite draw, runaway replication).
class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace standbyrel
