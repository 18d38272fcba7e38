#pragma once

#include <Eigen/Dense>
#include <array>

#include "anchorsim/dop.hpp"
#include "anchorsim/geometry.hpp"

namespace anchorsim {

/// Three robot positions near a freshly deployed anchor, each with the mean
/// of several consecutive (bias-compensated) ranging measurements to it.
struct BiasObservation {
  std::array<Point2, 3> positions;
  std::array<double, 3> mean_ranges;
};

enum class BiasMethod { DampedGaussNewton, LinearizedLS };

struct BiasEstimate {
  Eigen::Vector2d delta = Eigen::Vector2d::Zero();
  double residual_norm = 0.0;
  int iterations = 0;
  BiasMethod method = BiasMethod::DampedGaussNewton;
};

/// Deployment-offset regression: minimize over delta the squared residuals
/// [ ||p_j - a_hat + delta||^2 - range_j^2 ] for the three observations,
/// by damped Gauss-Newton from delta = 0.
BiasEstimate estimate_bias_nonlinear(const BiasObservation& obs, Point2 a_hat,
                                     int max_iterations = 100,
                                     double step_tolerance = 1e-10);

/// Single first-order expansion of the same problem around delta = 0,
/// solved in closed form. Cheaper, less accurate for larger offsets.
BiasEstimate estimate_bias_linearized(const BiasObservation& obs, Point2 a_hat);

/// Remove the estimated offset from a deployed anchor's stored estimate:
/// est_pos <- est_pos - delta_hat. Throws when applied to an initial anchor.
AnchorRecord correct_anchor(const AnchorRecord& record,
                            const BiasEstimate& estimate);

}  // namespace anchorsim
