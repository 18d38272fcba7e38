#include "anchorsim/maneuver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anchorsim/errors.hpp"

namespace anchorsim {

FsmState step_fsm(const FsmState& state, const FsmEvent& event) {
  switch (event.type) {
    case FsmEventType::ViolationDetected:
      if (state.kind != FsmStateKind::Mission)
        throw ProtocolError("violation event outside mission state");
      return {FsmStateKind::Deployment, event.resume_index};
    case FsmEventType::AnchorPlaced:
      if (state.kind != FsmStateKind::Deployment)
        throw ProtocolError("placement event outside deployment state");
      if (event.plan_complete || !event.continue_placement)
        return {FsmStateKind::Placed, state.resume_index};
      return state;  // sequential chaining: stay in DS
    case FsmEventType::OutboundLeg:
      if (state.kind != FsmStateKind::Placed)
        throw ProtocolError("outbound-leg event outside placed state");
      return {FsmStateKind::Deployment, state.resume_index};
    case FsmEventType::ReachedResume:
      if (state.kind != FsmStateKind::Placed)
        throw ProtocolError("resume event outside placed state");
      return {FsmStateKind::Mission, state.resume_index};
    case FsmEventType::MissionEnd:
      if (state.kind != FsmStateKind::Mission)
        throw ProtocolError("mission end outside mission state");
      return state;
  }
  throw ProtocolError("unknown fsm event");
}

namespace {

struct Builder {
  std::vector<Point2> waypoints;
  std::vector<FsmStateKind> leg_states;
  std::vector<ManeuverPath::Placement> placements;
  double length = 0.0;

  void start(Point2 p) { waypoints.push_back(p); }

  void walk_to(Point2 p, FsmStateKind leg) {
    const double d = distance(waypoints.back(), p);
    if (d < 1e-12) return;  // skip zero-length legs
    waypoints.push_back(p);
    leg_states.push_back(leg);
    length += d;
  }

  void walk_section(const std::vector<Point2>& section, FsmStateKind leg) {
    for (std::size_t i = 1; i < section.size(); ++i) walk_to(section[i], leg);
  }

  void place_here(Point2 p) { placements.push_back({waypoints.size() - 1, p}); }
};

double polyline_len(const std::vector<Point2>& pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    len += distance(pts[i - 1], pts[i]);
  return len;
}

}  // namespace

ManeuverPath plan_maneuver(std::span<const Point2> anchor_positions,
                           const ExplorationPath& path,
                           std::size_t resume_index) {
  if (anchor_positions.empty())
    throw InputError("deployment plan has no anchors");
  if (anchor_positions.size() > 4)
    throw InputError("at most 4 anchors can be placed at once");
  if (resume_index >= path.size())
    throw InputError("resume viapoint index past path end");

  const Point2 q_i = path[resume_index];
  const double station_i = path.station_of(resume_index);

  struct Target {
    Point2 anchor;
    Point2 foot;
    double station;
    std::size_t input_order;
  };
  std::vector<Target> targets;
  targets.reserve(anchor_positions.size());
  for (std::size_t k = 0; k < anchor_positions.size(); ++k) {
    const auto fr = foot_of_perpendicular(path, anchor_positions[k]);
    targets.push_back({anchor_positions[k], fr.foot, fr.station, k});
  }

  // strategy A: sweep the path, detour out-and-back at each foot
  std::vector<Target> by_station = targets;
  std::stable_sort(by_station.begin(), by_station.end(),
                   [](const Target& a, const Target& b) {
                     return a.station < b.station;
                   });
  Builder a;
  a.start(q_i);
  double cur_station = station_i;
  for (std::size_t k = 0; k < by_station.size(); ++k) {
    const bool last = k + 1 == by_station.size();
    a.walk_section(path.section(cur_station, by_station[k].station),
                   FsmStateKind::Deployment);
    a.walk_to(by_station[k].anchor, FsmStateKind::Deployment);
    a.place_here(by_station[k].anchor);
    a.walk_to(by_station[k].foot, FsmStateKind::Placed);
    cur_station = by_station[k].station;
    if (last)
      a.walk_section(path.section(cur_station, station_i), FsmStateKind::Placed);
  }
  a.walk_to(q_i, FsmStateKind::Placed);

  // strategy B: tour all anchors from the first foot, straight back to q_i;
  // the plan order is the default, every permutation is tried and the best kept
  std::vector<std::size_t> order(targets.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> best_order = order;
  double best_tour = -1.0;
  std::vector<std::size_t> perm = order;
  std::sort(perm.begin(), perm.end());
  auto tour_length = [&](const std::vector<std::size_t>& ord) {
    const Target& first = targets[ord[0]];
    double len = polyline_len(path.section(station_i, first.station));
    Point2 cur = first.foot;
    for (std::size_t idx : ord) {
      len += distance(cur, targets[idx].anchor);
      cur = targets[idx].anchor;
    }
    return len + distance(cur, q_i);
  };
  best_tour = tour_length(order);
  do {
    const double len = tour_length(perm);
    if (len < best_tour - 1e-12) {
      best_tour = len;
      best_order = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Builder b;
  b.start(q_i);
  const Target& first = targets[best_order[0]];
  b.walk_section(path.section(station_i, first.station), FsmStateKind::Deployment);
  for (std::size_t k = 0; k < best_order.size(); ++k) {
    b.walk_to(targets[best_order[k]].anchor, FsmStateKind::Deployment);
    b.place_here(targets[best_order[k]].anchor);
  }
  b.walk_to(q_i, FsmStateKind::Placed);

  ManeuverPath out;
  out.per_anchor_length = a.length;
  out.sequential_length = b.length;
  Builder& chosen = (b.length < a.length) ? b : a;
  out.strategy = (b.length < a.length) ? ManeuverStrategy::SequentialTour
                                       : ManeuverStrategy::PerAnchorBackAndForth;
  out.waypoints = std::move(chosen.waypoints);
  out.leg_states = std::move(chosen.leg_states);
  out.placements = std::move(chosen.placements);
  out.total_length = chosen.length;
  // closed at q_i even when every leg collapsed (anchor on the viapoint)
  if (out.waypoints.size() == 1) {
    out.waypoints.push_back(q_i);
    out.leg_states.push_back(FsmStateKind::Placed);
  }
  out.waypoints.front() = q_i;
  out.waypoints.back() = q_i;
  return out;
}

double traveled_distance(std::span<const Point2> trajectory) {
  if (trajectory.empty()) throw InputError("empty trajectory");
  double len = 0.0;
  for (std::size_t i = 1; i < trajectory.size(); ++i)
    len += distance(trajectory[i - 1], trajectory[i]);
  return len;
}

}  // namespace anchorsim
