#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "anchorsim/geometry.hpp"

namespace anchorsim {

/// One multilateration instance. anchors[0] is the reference anchor whose
/// squared range is subtracted from all others; variances carry sigma_rho^2
/// for initial anchors and sigma_eta^2 for deployed ones.
struct WlsProblem {
  std::vector<Point2> anchors;
  std::vector<double> ranges;     // measured, bias-compensated
  std::vector<double> variances;  // per-anchor sigma_i^2

  void validate() const;  // throws InputError on broken invariants
};

struct PositionEstimate {
  Point2 position;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
};

struct DesignSystem {
  Eigen::MatrixX2d A;  // row j-1 = a_j - a_1
  Eigen::VectorXd h;   // rho1^2 - rhoj^2 + ||a_j||^2 - ||a_1||^2; A s = h/2 noiselessly
  std::vector<int> degenerate_rows;  // rows where a_j coincides with a_1
};

/// Squared-range-difference design matrix and right-hand side.
DesignSystem build_design(const WlsProblem& problem);

/// Covariance of the squared-range differences: diagonal sigma_1^2 rho_1^2 +
/// sigma_j^2 rho_j^2, off-diagonal sigma_1^2 rho_1^2. Measured ranges are
/// plugged in for the unavailable true distances.
Eigen::MatrixXd build_covariance(const WlsProblem& problem);

/// Closed-form weighted least squares on the squared-range differences.
/// Throws DegenerateGeometryError (collinear anchors) or ConditioningError
/// (weight matrix condition number beyond 1e12).
PositionEstimate solve_wls(const WlsProblem& problem);

/// Damped Gauss-Newton minimization of sum_i (||s-a_i|| - range_i)^2 / var_i.
/// Slower but unbiased in the ranges; covariance is the Gauss-Newton one.
PositionEstimate solve_nonlinear(const WlsProblem& problem, Point2 init,
                                 int max_iterations = 100,
                                 double step_tolerance = 1e-12);

/// Index of the anchor to use as difference reference: nearest to the
/// previous estimate, ties toward the smaller index.
std::size_t pick_reference(std::span<const Point2> anchors, Point2 previous);

}  // namespace anchorsim
