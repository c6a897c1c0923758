#pragma once

#include <stdexcept>
#include <string>

namespace pilotq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dimension, range, id...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The configuration density is too small to define a velocity at the
/// requested point. Integrators react by refining the step.
class NodeError : public Error {
 public:
  NodeError(const std::string& what, double density)
      : Error(what), density_(density) {}
  double density() const noexcept { return density_; }

 private:
  double density_;
};

/// A trajectory could not be advanced past a node even at the minimum step.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, int trajectory_id, double time)
      : Error(what), trajectory_id_(trajectory_id), time_(time) {}
  int trajectory_id() const noexcept { return trajectory_id_; }
  double time() const noexcept { return time_; }

 private:
  int trajectory_id_;
  double time_;
};

/// Quadrature did not reach the requested tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The pointer packets were not separated enough to read off an outcome.
class AmbiguousReadout : public Error {
 public:
  AmbiguousReadout(const std::string& what, double displacement)
      : Error(what), displacement_(displacement) {}
  double displacement() const noexcept { return displacement_; }

 private:
  double displacement_;
};

/// A gate's global phase cannot be matched by the available free-evolution
/// waits.
class UnschedulablePhase : public Error {
 public:
  UnschedulablePhase(const std::string& what, double residual_phase)
      : Error(what), residual_phase_(residual_phase) {}
  double residual_phase() const noexcept { return residual_phase_; }

 private:
  double residual_phase_;
};

}  // namespace pilotq
