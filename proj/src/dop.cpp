#include "anchorsim/dop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anchorsim/errors.hpp"

namespace anchorsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDetFloor = 1e-12;
constexpr double kRangeFloor2 = 1e-18;  // squared; coincident query guard
// Anchor counts stay small by construction; fixed scratch avoids allocation
// in the subset search.
constexpr int kMaxAnchors = 64;
}  // namespace

AnchorSet AnchorSet::from_initial(const std::array<Point2, 4>& positions) {
  AnchorSet set;
  int id = 0;
  for (const auto& p : positions) {
    if (!is_finite(p)) throw InputError("non-finite initial anchor position");
    set.records_.push_back({id++, p, p, AnchorOrigin::Initial,
                            Eigen::Matrix2d::Zero()});
  }
  return set;
}

int AnchorSet::add_deployed(Point2 true_pos, Point2 est_pos,
                            const Eigen::Matrix2d& placement_cov) {
  if (!is_finite(true_pos) || !is_finite(est_pos))
    throw InputError("non-finite deployed anchor position");
  const int id = records_.empty() ? 0 : records_.back().id + 1;
  records_.push_back({id, true_pos, est_pos, AnchorOrigin::Deployed,
                      placement_cov});
  return id;
}

void AnchorSet::shift_estimate(int id, Eigen::Vector2d delta) {
  for (auto& rec : records_) {
    if (rec.id == id) {
      rec.est_pos.x -= delta.x();
      rec.est_pos.y -= delta.y();
      return;
    }
  }
  throw InputError("unknown anchor id " + std::to_string(id));
}

const AnchorRecord& AnchorSet::by_id(int id) const {
  for (const auto& rec : records_)
    if (rec.id == id) return rec;
  throw InputError("unknown anchor id " + std::to_string(id));
}

Eigen::MatrixX2d ranging_jacobian(std::span<const Point2> anchors, Point2 s) {
  Eigen::MatrixX2d jac(static_cast<Eigen::Index>(anchors.size()), 2);
  for (Eigen::Index i = 0; i < jac.rows(); ++i) {
    const Point2 d = s - anchors[static_cast<std::size_t>(i)];
    const double rho = norm(d);
    if (rho < 1e-9)
      throw DegenerateGeometryError(
          "query point coincides with anchor " + std::to_string(i));
    jac(i, 0) = d.x / rho;
    jac(i, 1) = d.y / rho;
  }
  return jac;
}

double pdop(std::span<const Point2> anchors, Point2 s) noexcept {
  if (anchors.size() < 3) return kInf;
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (const auto& a : anchors) {
    const double dx = s.x - a.x;
    const double dy = s.y - a.y;
    const double r2 = dx * dx + dy * dy;
    if (r2 < kRangeFloor2) return kInf;
    xx += dx * dx / r2;
    yy += dy * dy / r2;
    xy += dx * dy / r2;
  }
  const double det = xx * yy - xy * xy;
  if (det <= kDetFloor) return kInf;
  // trace(P^T P) = m for unit rows, so trace((P^T P)^-1) = m / det
  return std::sqrt(static_cast<double>(anchors.size()) / det);
}

std::optional<DopReport> try_best_subset(const AnchorSet& anchors, Point2 s,
                                         double rho_max) noexcept {
  // Per-anchor unit-vector outer products, precomputed once; each 4-subset
  // then costs a handful of adds. With unit rows trace(P^T P) = 4, so the
  // minimum pdop subset is the maximum determinant subset.
  double oxx[kMaxAnchors], oyy[kMaxAnchors], oxy[kMaxAnchors];
  int ids[kMaxAnchors];
  int m = 0;
  const double rho_max2 = rho_max * rho_max;
  for (const auto& rec : anchors.records()) {
    const double dx = s.x - rec.est_pos.x;
    const double dy = s.y - rec.est_pos.y;
    const double r2 = dx * dx + dy * dy;
    if (r2 > rho_max2 || r2 < kRangeFloor2) continue;
    if (m == kMaxAnchors) break;
    oxx[m] = dx * dx / r2;
    oyy[m] = dy * dy / r2;
    oxy[m] = dx * dy / r2;
    ids[m] = rec.id;
    ++m;
  }
  if (m < 4) return std::nullopt;

  double best_det = -1.0;
  int bi[4] = {0, 1, 2, 3};
  for (int a = 0; a < m - 3; ++a) {
    for (int b = a + 1; b < m - 2; ++b) {
      const double xx2 = oxx[a] + oxx[b];
      const double yy2 = oyy[a] + oyy[b];
      const double xy2 = oxy[a] + oxy[b];
      for (int c = b + 1; c < m - 1; ++c) {
        const double xx3 = xx2 + oxx[c];
        const double yy3 = yy2 + oyy[c];
        const double xy3 = xy2 + oxy[c];
        for (int d = c + 1; d < m; ++d) {
          const double xx = xx3 + oxx[d];
          const double yy = yy3 + oyy[d];
          const double xy = xy3 + oxy[d];
          const double det = xx * yy - xy * xy;
          // strict > keeps the lexicographically first tuple on ties
          if (det > best_det) {
            best_det = det;
            bi[0] = a; bi[1] = b; bi[2] = c; bi[3] = d;
          }
        }
      }
    }
  }
  DopReport report;
  report.query = s;
  report.pdop = best_det > kDetFloor ? std::sqrt(4.0 / best_det) : kInf;
  report.hdop = report.pdop;
  for (int k = 0; k < 4; ++k) report.subset[static_cast<std::size_t>(k)] = ids[bi[k]];
  return report;
}

DopReport best_subset(const AnchorSet& anchors, Point2 s, double rho_max) {
  auto report = try_best_subset(anchors, s, rho_max);
  if (!report) {
    int found = 0;
    const double rho_max2 = rho_max * rho_max;
    for (const auto& rec : anchors.records()) {
      const Point2 d = s - rec.est_pos;
      if (dot(d, d) <= rho_max2) ++found;
    }
    throw CoverageGapError("coverage gap: " + std::to_string(found) +
                               " anchors within rho_max of query",
                           found);
  }
  return *report;
}

double best_pdop_augmented(const AnchorSet& anchors,
                           std::span<const Point2> extra, Point2 s,
                           double rho_max) noexcept {
  double oxx[kMaxAnchors], oyy[kMaxAnchors], oxy[kMaxAnchors];
  int m = 0;
  const double rho_max2 = rho_max * rho_max;
  auto add = [&](Point2 pos) {
    const double dx = s.x - pos.x;
    const double dy = s.y - pos.y;
    const double r2 = dx * dx + dy * dy;
    if (r2 > rho_max2 || r2 < kRangeFloor2 || m == kMaxAnchors) return;
    oxx[m] = dx * dx / r2;
    oyy[m] = dy * dy / r2;
    oxy[m] = dx * dy / r2;
    ++m;
  };
  for (const auto& rec : anchors.records()) add(rec.est_pos);
  for (const auto& pos : extra) add(pos);
  if (m < 4) return kInf;

  double best_det = -1.0;
  for (int a = 0; a < m - 3; ++a)
    for (int b = a + 1; b < m - 2; ++b) {
      const double xx2 = oxx[a] + oxx[b];
      const double yy2 = oyy[a] + oyy[b];
      const double xy2 = oxy[a] + oxy[b];
      for (int c = b + 1; c < m - 1; ++c) {
        const double xx3 = xx2 + oxx[c];
        const double yy3 = yy2 + oyy[c];
        const double xy3 = xy2 + oxy[c];
        for (int d = c + 1; d < m; ++d) {
          const double xx = xx3 + oxx[d];
          const double yy = yy3 + oyy[d];
          const double xy = xy3 + oxy[d];
          const double det = xx * yy - xy * xy;
          if (det > best_det) best_det = det;
        }
      }
    }
  return best_det > kDetFloor ? std::sqrt(4.0 / best_det) : kInf;
}

Heatmap evaluate_heatmap(const AnchorSet& anchors, Point2 lo, Point2 hi,
                         double resolution, double rho_max) {
  if (resolution <= 0.0) throw InputError("heatmap resolution must be positive");
  if (hi.x < lo.x || hi.y < lo.y) throw InputError("heatmap bbox is inverted");
  Heatmap map;
  map.lo = lo;
  map.hi = hi;
  map.resolution = resolution;
  map.nx = static_cast<std::size_t>(std::floor((hi.x - lo.x) / resolution + 1e-9)) + 1;
  map.ny = static_cast<std::size_t>(std::floor((hi.y - lo.y) / resolution + 1e-9)) + 1;
  map.values.resize(map.nx * map.ny);
  for (std::size_t iy = 0; iy < map.ny; ++iy) {
    for (std::size_t ix = 0; ix < map.nx; ++ix) {
      const Point2 q{lo.x + static_cast<double>(ix) * resolution,
                     lo.y + static_cast<double>(iy) * resolution};
      const auto report = try_best_subset(anchors, q, rho_max);
      map.values[iy * map.nx + ix] = report ? report->pdop : kInf;
    }
  }
  return map;
}

double hdop_from_cov(const Eigen::Matrix4d& cov) {
  return std::sqrt(cov(0, 0) + cov(1, 1));
}
double vdop_from_cov(const Eigen::Matrix4d& cov) { return cov(2, 2); }
double pdop_from_cov(const Eigen::Matrix4d& cov) {
  return std::sqrt(cov(0, 0) + cov(1, 1) + cov(2, 2));
}
double gdop_from_cov(const Eigen::Matrix4d& cov) {
  return std::sqrt(cov(0, 0) + cov(1, 1) + cov(2, 2) + cov(3, 3));
}

}  // namespace anchorsim
