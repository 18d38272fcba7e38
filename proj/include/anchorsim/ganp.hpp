#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "anchorsim/dop.hpp"
#include "anchorsim/geometry.hpp"

namespace anchorsim {

struct GaParams {
  int population = 60;
  int generations = 80;
  double crossover_rate = 0.8;
  double mutation_rate = 0.15;
  int elite_count = 2;
  int stall_generations = 15;  // early stop after this many stale generations
  std::uint64_t seed = 0;
};

/// Placement-algorithm knobs. p_work = 0.95 * p_max is the working threshold
/// applied to every constraint check; the 5% headroom absorbs the neglected
/// anchor-offset effect on the PDoP.
struct GanpParams {
  double region_width = 27.0;  // w [m]
  double horizon = 30.0;       // r, meters of path ahead
  int subarea_count = 3;       // n
  double p_max = 1.5;
  double p_work = 1.425;
  double rho_max = 60.0;
  double check_step = 0.5;  // discretization for constraint checks [m]
  GaParams ga;

  void validate() const;  // throws InputError on broken invariants
};

/// Index of the last viapoint within horizon_m meters of path ahead of i
/// (clamped to the final viapoint).
std::size_t horizon_end_index(const ExplorationPath& path, std::size_t i,
                              double horizon_m);

struct DeploymentCheck {
  bool needed = false;
  std::size_t first_violation = 0;  // viapoint index, valid when needed
  double pdop_value = 0.0;          // +inf marks a coverage gap
};

/// Scans forecast viapoints q_i..q_{i+r}; reports the first one whose
/// best-subset PDoP exceeds p_work or where fewer than four anchors are in
/// range.
DeploymentCheck needs_deployment(const AnchorSet& anchors,
                                 const ExplorationPath& path, std::size_t i,
                                 const GanpParams& params);

/// Weighted forecast objective, lower is better:
///   Y = sum over q_j, j in (i, end] of pdop_j * ln(1 + ||q_j - q_i||)
/// with pdop_j the best-subset value over anchors plus the candidate
/// positions. Degenerate candidates contribute a large clamped term.
double placement_fitness(std::span<const Point2> candidate,
                         const AnchorSet& anchors, const ExplorationPath& path,
                         std::size_t i, std::size_t end_index,
                         const GanpParams& params);

struct ConstraintReport {
  bool anchor_points_ok = true;  // (i)  PDoP at every candidate position
  bool maneuver_ok = true;       // (ii) PDoP along the deployment maneuver
  bool forecast_ok = true;       // (iii) PDoP at every forecast viapoint
  double violation = 0.0;        // summed excess, for ranking infeasible ones
  bool feasible() const { return anchor_points_ok && maneuver_ok && forecast_ok; }
};

/// The three feasibility conditions, all against p_work at check_step
/// resolution. The shortest deployment maneuver is generated and walked with
/// the anchor set as it will exist leg by leg (anchors placed earlier in the
/// maneuver count for the later legs); this is what extends the optimization
/// from the planned path to the deployment flights as well.
ConstraintReport placement_constraints(std::span<const Point2> candidate,
                                       const AnchorSet& anchors,
                                       const ExplorationPath& path,
                                       std::size_t i, std::size_t end_index,
                                       const GanpParams& params);

struct PlacementPlan {
  std::vector<Point2> anchors;  // subarea order, near to far
  std::size_t resume_index = 0;
  double fitness_value = 0.0;
  ConstraintReport feasibility;
  std::size_t horizon_end = 0;  // last viapoint the plan certifies
};

/// Runs the genetic search for anchor counts c = 1, 2, ... (at most 4, at
/// most one anchor per subarea) and returns the feasible plan with the
/// smallest count, ties broken by fitness. When no count is feasible the
/// horizon is shortened one subarea at a time, forcing placement nearer the
/// robot; a collapsed horizon throws InfeasibleRegionError. Deterministic
/// given ga.seed.
PlacementPlan optimize_placement(const AnchorSet& anchors,
                                 const ExplorationPath& path, std::size_t i,
                                 const GanpParams& params);

}  // namespace anchorsim
