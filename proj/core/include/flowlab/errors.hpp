#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flowlab {

/// Base class for all flowlab runtime failures.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Rejected input (non-finite values, bad argument ranges).
class InvalidInputError : public Error {
public:
  using Error::Error;
};

/// Two fields were expected to live on the same grid.
class GridMismatchError : public Error {
public:
  using Error::Error;
};

/// Requested timestep violates the stability bound. Carries the largest
/// admissible dt so callers can retry.
class CflError : public Error {
public:
  CflError(double requested, double admissible)
      : Error("timestep " + std::to_string(requested) +
              " exceeds CFL limit, admissible dt = " +
              std::to_string(admissible)),
        requested_dt(requested), admissible_dt(admissible) {}
  double requested_dt;
  double admissible_dt;
};

/// A step produced a non-finite value. Carries the first offending node.
class BlowUpError : public Error {
public:
  BlowUpError(std::size_t node, double t)
      : Error("non-finite update at node " + std::to_string(node) +
              ", t = " + std::to_string(t)),
        node(node), t(t) {}
  std::size_t node;
  double t;
};

/// exp() overflow guard in the weighted integrals.
class OverflowError : public Error {
public:
  OverflowError(double max_value)
      : Error("exp overflow, max field value = " + std::to_string(max_value)),
        max_value(max_value) {}
  double max_value;
};

/// Newton iteration failed to reach tolerance. Carries the last residual norm.
class NewtonError : public Error {
public:
  NewtonError(double residual, int iterations)
      : Error("Newton iteration did not converge, residual = " +
              std::to_string(residual) + " after " +
              std::to_string(iterations) + " iterations"),
        residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

/// ODE integration failure (bowl profile). Carries the last good radius.
class IntegrationError : public Error {
public:
  IntegrationError(double last_r)
      : Error("ODE integration failed, last good r = " +
              std::to_string(last_r)),
        last_r(last_r) {}
  double last_r;
};

}  // namespace flowlab
