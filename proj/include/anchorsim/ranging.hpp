#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anchorsim/geometry.hpp"
#include "anchorsim/rng.hpp"

namespace anchorsim {

/// Calibrated UWB ranging error model: linear distance-dependent bias
/// bias(rho) = c0 + c1*rho plus zero-mean Gaussian noise. sigma is constant
/// by default; an optional (rho, sigma) table switches it to piecewise-linear
/// interpolation for hardware-characterized simulations.
struct RangingNoiseModel {
  double sigma_rho = 0.05;
  double bias_intercept = 0.0;  // c0 [m]
  double bias_slope = 0.0;      // c1 [-]
  std::vector<std::pair<double, double>> sigma_table;  // optional (rho, sigma)
  std::uint64_t seed = 0;

  double bias_at(double rho) const { return bias_intercept + bias_slope * rho; }
  double sigma_at(double rho) const;
  /// Invert the linear bias model: recover rho from a raw measurement.
  double compensate(double measured) const {
    return (measured - bias_intercept) / (1.0 + bias_slope);
  }
};

/// Seeded measurement stream. One stream per simulation run; the same seed
/// reproduces the measurement sequence bit for bit.
class RangingStream {
public:
  explicit RangingStream(const RangingNoiseModel& model,
                         std::uint64_t stream_id = 0);

  /// Measurement to an anchor at its true position: ||s-a|| + bias + eps.
  double range_true_anchor(Point2 a_true, Point2 s);

  /// Measurement to a deployed anchor believed at a_hat but physically at
  /// a_hat - delta. delta is a fixed realization per anchor, not redrawn.
  double range_deployed_anchor(Point2 a_hat, Point2 delta, Point2 s);

  const RangingNoiseModel& model() const { return model_; }

private:
  RangingNoiseModel model_;
  RngEngine engine_;
  std::normal_distribution<double> unit_normal_{0.0, 1.0};
};

/// Ordinary least-squares line through (true_distance, measured - true_distance).
/// Returns (c0, c1). Throws when all distances coincide.
std::pair<double, double> fit_bias_model(
    std::span<const std::pair<double, double>> samples);

/// Load calibration pairs from CSV with header `true_distance,measured`.
std::vector<std::pair<double, double>> load_calibration_csv(
    const std::string& filename);

/// Variance of the ranging error to a deployed anchor: sigma_rho^2 + F Xi F^T
/// (F the unit row toward the anchor estimate, Xi the placement covariance).
/// Throws when Xi is not symmetric positive semidefinite.
double propagated_sigma_eta(double sigma_rho, const Eigen::RowVector2d& F,
                            const Eigen::Matrix2d& Xi);

}  // namespace anchorsim
