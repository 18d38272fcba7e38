#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "anchorsim/geometry.hpp"

namespace anchorsim {

enum class FsmStateKind { Mission, Deployment, Placed };

/// Robot behavioral state plus the stored mission-path resume viapoint.
struct FsmState {
  FsmStateKind kind = FsmStateKind::Mission;
  std::size_t resume_index = 0;
};

enum class TerminalAction { BecomeAnchor, ContinueNewArea, ReturnToStart };

enum class FsmEventType {
  ViolationDetected,  // MS -> DS, stores resume viapoint
  AnchorPlaced,       // DS: chain (sequential), or head back (-> PS)
  OutboundLeg,        // PS -> DS, further anchors remain
  ReachedResume,      // PS -> MS at q_i
  MissionEnd          // MS at the last viapoint; emits the terminal action
};

struct FsmEvent {
  FsmEventType type;
  std::size_t resume_index = 0;     // ViolationDetected
  bool plan_complete = false;       // AnchorPlaced
  bool continue_placement = false;  // AnchorPlaced, sequential chaining
};

/// Pure transition function. Throws ProtocolError on an event that is not
/// legal in the given state.
FsmState step_fsm(const FsmState& state, const FsmEvent& event);

enum class ManeuverStrategy { PerAnchorBackAndForth, SequentialTour };

/// Closed deployment maneuver: starts and ends at the resume viapoint q_i and
/// visits every planned anchor position.
struct ManeuverPath {
  std::vector<Point2> waypoints;  // front() == back() == q_i
  double total_length = 0.0;
  ManeuverStrategy strategy = ManeuverStrategy::PerAnchorBackAndForth;

  struct Placement {
    std::size_t waypoint_index;
    Point2 position;
  };
  std::vector<Placement> placements;       // traversal order
  std::vector<FsmStateKind> leg_states;    // per segment: Deployment / Placed
  double per_anchor_length = 0.0;          // both candidates, for inspection
  double sequential_length = 0.0;
};

/// Builds both deployment strategies and returns the shorter:
///   A) walk the mission path to each anchor's perpendicular foot, out and
///      back, then return along the path to q_i;
///   B) walk to the first foot, then visit all anchors in sequence and fly
///      straight back to q_i (best order over <= 4! permutations).
ManeuverPath plan_maneuver(std::span<const Point2> anchor_positions,
                           const ExplorationPath& path,
                           std::size_t resume_index);

/// Polyline length of a realized trajectory.
double traveled_distance(std::span<const Point2> trajectory);

}  // namespace anchorsim
