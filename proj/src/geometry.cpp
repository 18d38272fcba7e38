#include "anchorsim/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "anchorsim/errors.hpp"

namespace anchorsim {

ExplorationPath::ExplorationPath(std::vector<Point2> viapoints)
    : viapoints_(std::move(viapoints)) {
  if (viapoints_.size() < 2)
    throw InputError("exploration path needs at least 2 viapoints, got " +
                     std::to_string(viapoints_.size()));
  stations_.resize(viapoints_.size());
  stations_[0] = 0.0;
  for (std::size_t i = 0; i < viapoints_.size(); ++i) {
    if (!is_finite(viapoints_[i]))
      throw InputError("non-finite viapoint at row " + std::to_string(i));
    if (i > 0) {
      const double d = distance(viapoints_[i - 1], viapoints_[i]);
      if (d <= 0.0)
        throw InputError("consecutive viapoints coincide at row " +
                         std::to_string(i));
      stations_[i] = stations_[i - 1] + d;
    }
  }
}

Point2 ExplorationPath::point_at_station(double s) const {
  if (s <= 0.0) return viapoints_.front();
  if (s >= length()) return viapoints_.back();
  auto it = std::upper_bound(stations_.begin(), stations_.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - stations_.begin());
  const double seg = stations_[j] - stations_[j - 1];
  const double t = (s - stations_[j - 1]) / seg;
  return viapoints_[j - 1] + t * (viapoints_[j] - viapoints_[j - 1]);
}

std::vector<Point2> ExplorationPath::section(double station_a,
                                             double station_b) const {
  const bool reversed = station_b < station_a;
  const double lo = std::clamp(std::min(station_a, station_b), 0.0, length());
  const double hi = std::clamp(std::max(station_a, station_b), 0.0, length());
  std::vector<Point2> out;
  out.push_back(point_at_station(lo));
  for (std::size_t i = 0; i < viapoints_.size(); ++i) {
    if (stations_[i] > lo + 1e-12 && stations_[i] < hi - 1e-12)
      out.push_back(viapoints_[i]);
  }
  if (hi > lo) out.push_back(point_at_station(hi));
  if (reversed) std::reverse(out.begin(), out.end());
  return out;
}

namespace {

double parse_double(const std::string& tok, std::size_t line_no) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{})
    throw InputError("cannot parse number '" + tok + "' at line " +
                     std::to_string(line_no));
  return v;
}

}  // namespace

ExplorationPath load_path_csv(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw InputError("cannot open path csv: " + filename);
  std::string line;
  std::size_t line_no = 0;
  std::vector<Point2> pts;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "x,y")
        throw InputError("path csv must start with header 'x,y', got '" +
                         line + "'");
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw InputError("missing comma at line " + std::to_string(line_no) +
                       " of " + filename);
    pts.push_back({parse_double(line.substr(0, comma), line_no),
                   parse_double(line.substr(comma + 1), line_no)});
  }
  return ExplorationPath(std::move(pts));
}

Point2 SearchRegion::axis_dir() const {
  const double len = chord_length();
  return {(chord_end.x - chord_start.x) / len,
          (chord_end.y - chord_start.y) / len};
}

Point2 SearchRegion::normal_dir() const { return perp(axis_dir()); }

std::array<Point2, 4> SearchRegion::corners() const {
  const Point2 nrm = normal_dir();
  const double h = width / 2.0;
  return {chord_start + h * nrm, chord_end + h * nrm,
          chord_end + (-h) * nrm, chord_start + (-h) * nrm};
}

Point2 SearchRegion::local_to_world(double t_along, double v_across) const {
  return chord_start + t_along * axis_dir() + v_across * normal_dir();
}

bool SearchRegion::contains(Point2 p, double tol) const {
  const Point2 rel = p - chord_start;
  const double t = dot(rel, axis_dir());
  const double v = dot(rel, normal_dir());
  return t >= -tol && t <= chord_length() + tol && std::abs(v) <= width / 2.0 + tol;
}

SearchRegion grow_search_region(const ExplorationPath& path, std::size_t i,
                                std::size_t r_horizon, double width) {
  if (i >= path.size())
    throw InputError("start index past path end");
  if (width <= 0.0) throw InputError("region width must be positive");
  std::size_t end = i + r_horizon;
  bool clamped = false;
  if (end >= path.size()) {
    end = path.size() - 1;
    clamped = true;
  }
  if (end == i)
    throw DegenerateGeometryError("search region chord has zero length");
  SearchRegion region;
  region.chord_start = path[i];
  region.chord_end = path[end];
  region.width = width;
  region.start_index = i;
  region.end_index = end;
  region.clamped = clamped;
  if (region.chord_length() <= 0.0)
    throw DegenerateGeometryError("search region chord has zero length");
  return region;
}

SubareaSet split_subareas(const SearchRegion& region, std::size_t n,
                          double min_slice_length) {
  if (n < 1) throw InputError("subarea count must be >= 1");
  const double len = region.chord_length();
  if (len / static_cast<double>(n) < min_slice_length)
    throw InputError("subarea count " + std::to_string(n) +
                     " exceeds chord resolution (" + std::to_string(len) +
                     " m chord)");
  SubareaSet out;
  out.subareas.reserve(n);
  const Point2 axis = region.axis_dir();
  for (std::size_t j = 0; j < n; ++j) {
    SearchRegion slice = region;
    slice.chord_start = region.chord_start +
                        (len * static_cast<double>(j) / static_cast<double>(n)) * axis;
    slice.chord_end = region.chord_start +
                      (len * static_cast<double>(j + 1) / static_cast<double>(n)) * axis;
    out.subareas.push_back(slice);
  }
  return out;
}

FootResult foot_of_perpendicular(const ExplorationPath& path, Point2 p) {
  FootResult best{path[0], 0.0};
  double best_d2 = dot(p - path[0], p - path[0]);
  double station = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Point2 a = path[i];
    const Point2 b = path[i + 1];
    const Point2 ab = b - a;
    const double seg_len2 = dot(ab, ab);
    double t = dot(p - a, ab) / seg_len2;
    t = std::clamp(t, 0.0, 1.0);
    const Point2 proj = a + t * ab;
    const Point2 d = p - proj;
    const double d2 = dot(d, d);
    // strict < keeps the first (smaller-station) foot on ties
    if (d2 < best_d2 - 1e-15 * (1.0 + best_d2)) {
      best_d2 = d2;
      best.foot = proj;
      best.station = station + t * std::sqrt(seg_len2);
    }
    station += std::sqrt(seg_len2);
  }
  return best;
}

std::vector<Point2> discretize(Point2 a, Point2 b, double step) {
  if (step <= 0.0) throw InputError("discretization step must be positive");
  const double len = distance(a, b);
  std::vector<Point2> out;
  if (len == 0.0) {
    out.push_back(a);
    return out;
  }
  const auto intervals =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / step - 1e-12)));
  out.reserve(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(intervals);
    out.push_back(a + t * (b - a));
  }
  return out;
}

std::vector<Point2> discretize_polyline(const std::vector<Point2>& polyline,
                                        double step) {
  if (step <= 0.0) throw InputError("discretization step must be positive");
  std::vector<Point2> out;
  if (polyline.empty()) return out;
  out.push_back(polyline.front());
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const auto seg = discretize(polyline[i], polyline[i + 1], step);
    out.insert(out.end(), seg.begin() + 1, seg.end());
  }
  return out;
}

}  // namespace anchorsim
