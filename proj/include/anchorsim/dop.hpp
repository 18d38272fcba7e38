#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <vector>

#include "anchorsim/geometry.hpp"

namespace anchorsim {

enum class AnchorOrigin { Initial, Deployed };

/// One ranging anchor: where it really is, where the robot believes it is,
/// and (for deployed anchors) the robot position covariance at placement time.
struct AnchorRecord {
  int id = 0;
  Point2 true_pos;
  Point2 est_pos;
  AnchorOrigin origin = AnchorOrigin::Initial;
  Eigen::Matrix2d placement_cov = Eigen::Matrix2d::Zero();
};

/// The overall anchor set A_k. Starts from exactly four initial anchors;
/// deployed anchors are appended with increasing ids.
class AnchorSet {
public:
  static AnchorSet from_initial(const std::array<Point2, 4>& positions);

  /// Appends a deployed anchor and returns its id.
  int add_deployed(Point2 true_pos, Point2 est_pos,
                   const Eigen::Matrix2d& placement_cov);
  /// Shift an anchor's estimated position by -delta (deployment-bias removal).
  void shift_estimate(int id, Eigen::Vector2d delta);

  const std::vector<AnchorRecord>& records() const { return records_; }
  const AnchorRecord& by_id(int id) const;
  std::size_t size() const { return records_.size(); }

private:
  AnchorSet() = default;
  std::vector<AnchorRecord> records_;  // kept sorted by id (append-only)
};

/// Best four-anchor choice at a query point.
struct DopReport {
  double pdop = 0.0;
  double hdop = 0.0;  // planar metric: coincides with pdop here
  std::array<int, 4> subset{};
  Point2 query;
};

/// Jacobian of the ranging function: row i = [(x-X_i)/rho_i, (y-Y_i)/rho_i].
/// Throws DegenerateGeometryError if s coincides with an anchor.
Eigen::MatrixX2d ranging_jacobian(std::span<const Point2> anchors, Point2 s);

/// sqrt(trace((P^T P)^-1)). Returns +inf on degenerate geometry (collinear
/// anchors, coincident query, fewer than 3 anchors) instead of throwing, so
/// optimizer loops can reject bad candidates cheaply.
double pdop(std::span<const Point2> anchors, Point2 s) noexcept;

/// Exhaustive minimum of pdop over all 4-combinations of anchors within
/// rho_max of s (estimated positions). Ties break toward the lexicographically
/// smallest id tuple. Empty when fewer than 4 anchors are in range.
std::optional<DopReport> try_best_subset(const AnchorSet& anchors, Point2 s,
                                         double rho_max) noexcept;

/// As try_best_subset, but a coverage gap throws CoverageGapError carrying
/// the number of in-range anchors found.
DopReport best_subset(const AnchorSet& anchors, Point2 s, double rho_max);

/// Best-subset pdop over the anchor set augmented with extra positions
/// (candidate anchors under evaluation, taken at face value). Returns +inf
/// when coverage fails; never throws. Hot path of the placement optimizer.
double best_pdop_augmented(const AnchorSet& anchors,
                           std::span<const Point2> extra, Point2 s,
                           double rho_max) noexcept;

/// Regular grid of best-subset pdop values; +inf sentinel where coverage fails.
struct Heatmap {
  Point2 lo, hi;
  double resolution = 0.0;
  std::size_t nx = 0, ny = 0;
  std::vector<double> values;  // row-major, rows scan y from lo.y up

  double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
};

Heatmap evaluate_heatmap(const AnchorSet& anchors, Point2 lo, Point2 hi,
                         double resolution, double rho_max);

// Documented DoP family over a supplied (x,y,z,t) covariance. Completeness
// only; the pipeline uses the planar pdop above.
double hdop_from_cov(const Eigen::Matrix4d& cov);
double vdop_from_cov(const Eigen::Matrix4d& cov);
double pdop_from_cov(const Eigen::Matrix4d& cov);
double gdop_from_cov(const Eigen::Matrix4d& cov);

}  // namespace anchorsim
