#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace anchorsim {

/// Planar position in meters. The universal coordinate carrier.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double c, Point2 p) { return {c * p.x, c * p.y}; }
  friend bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
// counterclockwise perpendicular
inline Point2 perp(Point2 p) { return {-p.y, p.x}; }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Ordered viapoints of a planned exploration path (a polyline).
class ExplorationPath {
public:
  explicit ExplorationPath(std::vector<Point2> viapoints);

  const std::vector<Point2>& viapoints() const { return viapoints_; }
  std::size_t size() const { return viapoints_.size(); }
  const Point2& operator[](std::size_t i) const { return viapoints_[i]; }

  double length() const { return stations_.back(); }
  /// Arclength from the first viapoint to viapoint i.
  double station_of(std::size_t i) const { return stations_[i]; }
  /// Point at arclength s (clamped to [0, length]).
  Point2 point_at_station(double s) const;
  /// Polyline section between two stations, endpoints included, bends preserved.
  /// Reversed output when b < a.
  std::vector<Point2> section(double station_a, double station_b) const;

private:
  std::vector<Point2> viapoints_;
  std::vector<double> stations_;
};

/// Load a path from CSV with header `x,y`, one viapoint per row, meters.
ExplorationPath load_path_csv(const std::string& filename);

/// Rectangular search region of width w grown around the chord q_i -> q_{i+r}.
struct SearchRegion {
  Point2 chord_start;
  Point2 chord_end;
  double width = 0.0;
  std::size_t start_index = 0;  // i
  std::size_t end_index = 0;    // index of the chord end viapoint
  bool clamped = false;         // horizon hit the path end

  double chord_length() const { return distance(chord_start, chord_end); }
  Point2 axis_dir() const;    // unit vector along the chord
  Point2 normal_dir() const;  // unit left normal
  std::array<Point2, 4> corners() const;
  double area() const { return chord_length() * width; }
  /// Map (t along chord in [0, chord_length], v across in [-w/2, w/2]) to world.
  Point2 local_to_world(double t_along, double v_across) const;
  bool contains(Point2 p, double tol = 1e-9) const;
};

/// Equal-length slices of a search region along its chord, near to far.
struct SubareaSet {
  std::vector<SearchRegion> subareas;
};

/// Grow the search rectangle around the chord from viapoint i, r_horizon
/// viapoints ahead. A horizon past the path end is clamped to the last
/// viapoint and reported through SearchRegion::clamped / end_index.
SearchRegion grow_search_region(const ExplorationPath& path, std::size_t i,
                                std::size_t r_horizon, double width);

/// Split a region into n equal slices along the chord axis, ordered from the
/// chord start outward. Throws when slices would fall below min_slice_length.
SubareaSet split_subareas(const SearchRegion& region, std::size_t n,
                          double min_slice_length = 0.5);

struct FootResult {
  Point2 foot;     // closest point of the polyline
  double station;  // arclength station of the foot
};

/// Closest point of the path to p; ties broken toward the smaller station.
FootResult foot_of_perpendicular(const ExplorationPath& path, Point2 p);

/// Sample a segment with spacing <= step; both endpoints included.
std::vector<Point2> discretize(Point2 a, Point2 b, double step);

/// Sample a polyline with spacing <= step; every vertex is emitted.
std::vector<Point2> discretize_polyline(const std::vector<Point2>& polyline,
                                        double step);

}  // namespace anchorsim
