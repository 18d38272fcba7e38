#pragma once

#include <stdexcept>
#include <string>

namespace anchorsim {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed scenario/CSV/CLI input.
class InputError : public Error {
public:
  using Error::Error;
};

// Collinear anchors, coincident query point, rank-deficient design.
class DegenerateGeometryError : public Error {
public:
  using Error::Error;
};

// Fewer than four anchors in range of the query point.
class CoverageGapError : public Error {
public:
  CoverageGapError(const std::string& what, int found_in_range)
      : Error(what), found(found_in_range) {}
  int found;
};

// Ill-conditioned weight matrix or similar numerical trouble.
class ConditioningError : public Error {
public:
  using Error::Error;
};

// Iterative solver ran out of iterations; carries the best iterate seen.
class NonConvergenceError : public Error {
public:
  NonConvergenceError(const std::string& what, double bx, double by)
      : Error(what), best_x(bx), best_y(by) {}
  double best_x;
  double best_y;
};

// FSM received an event that is not legal in its current state.
class ProtocolError : public Error {
public:
  using Error::Error;
};

// The placement optimizer could not produce a feasible plan.
class InfeasibleRegionError : public Error {
public:
  using Error::Error;
};

}  // namespace anchorsim
