#include "anchorsim/multilateration.hpp"

#include <cmath>

#include "anchorsim/errors.hpp"

namespace anchorsim {

void WlsProblem::validate() const {
  if (anchors.size() < 3)
    throw InputError("multilateration needs at least three anchors, got " +
                     std::to_string(anchors.size()));
  if (ranges.size() != anchors.size() || variances.size() != anchors.size())
    throw InputError("anchors/ranges/variances size mismatch");
  for (double v : variances)
    if (!(v > 0.0)) throw InputError("range variances must be positive");
  for (const auto& a : anchors)
    if (!is_finite(a)) throw InputError("non-finite anchor position");
}

DesignSystem build_design(const WlsProblem& problem) {
  problem.validate();
  const auto n = problem.anchors.size();
  DesignSystem sys;
  sys.A.resize(static_cast<Eigen::Index>(n - 1), 2);
  sys.h.resize(static_cast<Eigen::Index>(n - 1));
  const Point2 a1 = problem.anchors[0];
  const double a1n2 = dot(a1, a1);
  const double r1sq = problem.ranges[0] * problem.ranges[0];
  for (std::size_t j = 1; j < n; ++j) {
    const Point2 aj = problem.anchors[j];
    const Eigen::Index row = static_cast<Eigen::Index>(j - 1);
    sys.A(row, 0) = aj.x - a1.x;
    sys.A(row, 1) = aj.y - a1.y;
    sys.h(row) = r1sq - problem.ranges[j] * problem.ranges[j] + dot(aj, aj) - a1n2;
    if (distance(aj, a1) < 1e-12)
      sys.degenerate_rows.push_back(static_cast<int>(row));
  }
  return sys;
}

Eigen::MatrixXd build_covariance(const WlsProblem& problem) {
  problem.validate();
  const auto n = problem.anchors.size();
  const double ref = problem.variances[0] * problem.ranges[0] * problem.ranges[0];
  Eigen::MatrixXd N = Eigen::MatrixXd::Constant(
      static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1), ref);
  for (std::size_t j = 1; j < n; ++j) {
    const Eigen::Index row = static_cast<Eigen::Index>(j - 1);
    N(row, row) = ref + problem.variances[j] * problem.ranges[j] * problem.ranges[j];
  }
  return N;
}

PositionEstimate solve_wls(const WlsProblem& problem) {
  const DesignSystem sys = build_design(problem);
  const Eigen::MatrixXd N = build_covariance(problem);

  const Eigen::JacobiSVD<Eigen::MatrixXd> nsvd(N);
  const double ncond = nsvd.singularValues()(0) /
                       nsvd.singularValues()(nsvd.singularValues().size() - 1);
  if (!std::isfinite(ncond) || ncond > 1e12)
    throw ConditioningError("measurement covariance is ill-conditioned");

  const Eigen::JacobiSVD<Eigen::MatrixX2d> asvd(sys.A);
  if (asvd.singularValues()(1) <= 1e-9 * asvd.singularValues()(0))
    throw DegenerateGeometryError("collinear anchors: design matrix rank < 2");

  const Eigen::MatrixXd Ninv = N.inverse();
  const Eigen::Matrix2d info = sys.A.transpose() * Ninv * sys.A;
  const Eigen::Matrix2d Xi = info.inverse();
  const Eigen::Vector2d s = 0.5 * Xi * (sys.A.transpose() * (Ninv * sys.h));

  PositionEstimate est;
  est.position = {s.x(), s.y()};
  est.covariance = Xi;
  return est;
}

PositionEstimate solve_nonlinear(const WlsProblem& problem, Point2 init,
                                 int max_iterations, double step_tolerance) {
  problem.validate();
  if (!is_finite(init)) throw InputError("non-finite initial guess");
  const auto n = static_cast<Eigen::Index>(problem.anchors.size());

  Eigen::Vector2d s(init.x, init.y);
  auto residuals = [&](const Eigen::Vector2d& p, Eigen::VectorXd& r) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& a = problem.anchors[static_cast<std::size_t>(i)];
      const double dx = p.x() - a.x, dy = p.y() - a.y;
      const double rho = std::sqrt(dx * dx + dy * dy);
      r(i) = (rho - problem.ranges[static_cast<std::size_t>(i)]) /
             std::sqrt(problem.variances[static_cast<std::size_t>(i)]);
    }
  };

  Eigen::VectorXd r(n), r_try(n);
  residuals(s, r);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  Eigen::MatrixX2d J(n, 2);
  Eigen::Vector2d best = s;
  double best_cost = cost;

  for (int it = 0; it < max_iterations; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& a = problem.anchors[static_cast<std::size_t>(i)];
      const double dx = s.x() - a.x, dy = s.y() - a.y;
      const double rho = std::sqrt(dx * dx + dy * dy);
      const double w = std::sqrt(problem.variances[static_cast<std::size_t>(i)]);
      if (rho < 1e-12) {
        J(i, 0) = 0.0;
        J(i, 1) = 0.0;
      } else {
        J(i, 0) = dx / (rho * w);
        J(i, 1) = dy / (rho * w);
      }
    }
    const Eigen::Matrix2d JtJ = J.transpose() * J;
    const Eigen::Vector2d g = J.transpose() * r;
    Eigen::Matrix2d damped = JtJ;
    damped(0, 0) += lambda;
    damped(1, 1) += lambda;
    const Eigen::Vector2d step = damped.ldlt().solve(-g);
    if (!step.allFinite())
      throw DegenerateGeometryError("nonlinear solve: singular normal equations");
    const Eigen::Vector2d s_try = s + step;
    residuals(s_try, r_try);
    const double cost_try = r_try.squaredNorm();
    if (cost_try < cost) {
      s = s_try;
      r = r_try;
      cost = cost_try;
      lambda = std::max(lambda * 0.1, 1e-12);
      if (cost < best_cost) {
        best = s;
        best_cost = cost;
      }
      if (step.norm() < step_tolerance) {
        PositionEstimate est;
        est.position = {s.x(), s.y()};
        est.covariance = JtJ.inverse();
        return est;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12)
        throw NonConvergenceError("nonlinear solve stalled", best.x(), best.y());
    }
  }
  throw NonConvergenceError("nonlinear solve: iteration limit reached",
                            best.x(), best.y());
}

std::size_t pick_reference(std::span<const Point2> anchors, Point2 previous) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const Point2 d = anchors[i] - previous;
    const double d2 = dot(d, d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

}  // namespace anchorsim
