#include "anchorsim/bias.hpp"

#include <cmath>

#include "anchorsim/errors.hpp"

namespace anchorsim {

namespace {

void check_identifiable(const BiasObservation& obs, Point2 a_hat) {
  for (int j = 0; j < 3; ++j) {
    if (!is_finite(obs.positions[static_cast<std::size_t>(j)]) ||
        !std::isfinite(obs.mean_ranges[static_cast<std::size_t>(j)]))
      throw InputError("non-finite bias observation");
    for (int l = j + 1; l < 3; ++l)
      if (distance(obs.positions[static_cast<std::size_t>(j)],
                   obs.positions[static_cast<std::size_t>(l)]) < 1e-9)
        throw DegenerateGeometryError("bias observation positions coincide");
  }
  // anchor estimate on the observation line makes delta unidentifiable
  const Point2 u = obs.positions[1] - obs.positions[0];
  const Point2 v = obs.positions[2] - obs.positions[0];
  const Point2 w = a_hat - obs.positions[0];
  const double span = norm(u) + norm(v);
  const double cross_uv = u.x * v.y - u.y * v.x;
  if (std::abs(cross_uv) < 1e-12 * span * span) {
    const double cross_uw = u.x * w.y - u.y * w.x;
    if (std::abs(cross_uw) < 1e-9 * span * (norm(w) + 1.0))
      throw DegenerateGeometryError(
          "anchor estimate collinear with observation positions");
  }
}

// residual j: ||p_j - a_hat + delta||^2 - range_j^2, Jacobian 2(p_j - a_hat + delta)
void eval(const BiasObservation& obs, Point2 a_hat,
          const Eigen::Vector2d& delta, Eigen::Vector3d& r,
          Eigen::Matrix<double, 3, 2>& J) {
  for (int j = 0; j < 3; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    const double ex = obs.positions[idx].x - a_hat.x + delta.x();
    const double ey = obs.positions[idx].y - a_hat.y + delta.y();
    r(j) = ex * ex + ey * ey - obs.mean_ranges[idx] * obs.mean_ranges[idx];
    J(j, 0) = 2.0 * ex;
    J(j, 1) = 2.0 * ey;
  }
}

}  // namespace

BiasEstimate estimate_bias_nonlinear(const BiasObservation& obs, Point2 a_hat,
                                     int max_iterations,
                                     double step_tolerance) {
  check_identifiable(obs, a_hat);
  Eigen::Vector2d delta = Eigen::Vector2d::Zero();
  Eigen::Vector3d r;
  Eigen::Matrix<double, 3, 2> J;
  eval(obs, a_hat, delta, r, J);
  double cost = r.squaredNorm();
  Eigen::Vector2d best = delta;
  double best_cost = cost;
  double lambda = 1e-3;

  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::Matrix2d JtJ = J.transpose() * J;
    if (JtJ.jacobiSvd().singularValues()(1) <= 1e-12 * (1.0 + JtJ.norm()))
      throw DegenerateGeometryError("bias regression Jacobian rank < 2");
    const Eigen::Vector2d g = J.transpose() * r;
    Eigen::Matrix2d damped = JtJ;
    damped(0, 0) += lambda;
    damped(1, 1) += lambda;
    const Eigen::Vector2d step = damped.ldlt().solve(-g);
    const Eigen::Vector2d delta_try = delta + step;
    Eigen::Vector3d r_try;
    Eigen::Matrix<double, 3, 2> J_try;
    eval(obs, a_hat, delta_try, r_try, J_try);
    const double cost_try = r_try.squaredNorm();
    if (cost_try < cost) {
      delta = delta_try;
      r = r_try;
      J = J_try;
      cost = cost_try;
      lambda = std::max(lambda * 0.1, 1e-15);
      if (cost < best_cost) {
        best = delta;
        best_cost = cost;
      }
      if (step.norm() < step_tolerance)
        return {delta, std::sqrt(cost), it, BiasMethod::DampedGaussNewton};
    } else {
      lambda *= 10.0;
      if (lambda > 1e14)
        throw NonConvergenceError("bias regression stalled", best.x(), best.y());
    }
  }
  throw NonConvergenceError("bias regression: iteration limit reached",
                            best.x(), best.y());
}

BiasEstimate estimate_bias_linearized(const BiasObservation& obs,
                                      Point2 a_hat) {
  check_identifiable(obs, a_hat);
  Eigen::Vector3d r;
  Eigen::Matrix<double, 3, 2> J;
  eval(obs, a_hat, Eigen::Vector2d::Zero(), r, J);
  const Eigen::Matrix2d JtJ = J.transpose() * J;
  if (JtJ.jacobiSvd().singularValues()(1) <= 1e-12 * (1.0 + JtJ.norm()))
    throw DegenerateGeometryError("bias regression: singular normal equations");
  const Eigen::Vector2d delta = JtJ.ldlt().solve(-J.transpose() * r);
  Eigen::Vector3d r_final;
  Eigen::Matrix<double, 3, 2> J_final;
  eval(obs, a_hat, delta, r_final, J_final);
  return {delta, r_final.norm(), 1, BiasMethod::LinearizedLS};
}

AnchorRecord correct_anchor(const AnchorRecord& record,
                            const BiasEstimate& estimate) {
  if (record.origin != AnchorOrigin::Deployed)
    throw InputError("bias correction applies to deployed anchors only");
  if (!estimate.delta.allFinite())
    throw InputError("non-finite bias estimate");
  AnchorRecord corrected = record;
  corrected.est_pos.x -= estimate.delta.x();
  corrected.est_pos.y -= estimate.delta.y();
  return corrected;
}

}  // namespace anchorsim
