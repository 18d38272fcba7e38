#include "anchorsim/ganp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "anchorsim/errors.hpp"
#include "anchorsim/maneuver.hpp"
#include "anchorsim/rng.hpp"

namespace anchorsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// degenerate candidates must rank worse than anything real, yet stay finite
// so the GA can still order them
constexpr double kPdopClamp = 1e6;
constexpr double kViolationCap = 10.0;
}  // namespace

void GanpParams::validate() const {
  if (!(region_width > 0.0)) throw InputError("ganp: w must be positive");
  if (!(horizon > 0.0)) throw InputError("ganp: r must be positive");
  if (subarea_count < 1) throw InputError("ganp: n must be >= 1");
  if (!(p_work > 0.0 && p_work < p_max))
    throw InputError("ganp: requires 0 < p_work < p_max");
  if (!(rho_max > 0.0)) throw InputError("ganp: rho_max must be positive");
  if (!(check_step > 0.0)) throw InputError("ganp: check_step must be positive");
  if (ga.population < 2 || ga.generations < 1 || ga.elite_count < 0 ||
      ga.elite_count >= ga.population)
    throw InputError("ganp: bad GA sizes");
}

std::size_t horizon_end_index(const ExplorationPath& path, std::size_t i,
                              double horizon_m) {
  if (i >= path.size()) throw InputError("viapoint index past path end");
  const double limit = path.station_of(i) + horizon_m + 1e-9;
  std::size_t end = i;
  while (end + 1 < path.size() && path.station_of(end + 1) <= limit) ++end;
  return end;
}

DeploymentCheck needs_deployment(const AnchorSet& anchors,
                                 const ExplorationPath& path, std::size_t i,
                                 const GanpParams& params) {
  params.validate();
  const std::size_t end = horizon_end_index(path, i, params.horizon);
  for (std::size_t j = i; j <= end; ++j) {
    const auto report = try_best_subset(anchors, path[j], params.rho_max);
    if (!report) return {true, j, kInf};
    if (report->pdop > params.p_work) return {true, j, report->pdop};
  }
  return {false, end, 0.0};
}

double placement_fitness(std::span<const Point2> candidate,
                         const AnchorSet& anchors, const ExplorationPath& path,
                         std::size_t i, std::size_t end_index,
                         const GanpParams& params) {
  double y = 0.0;
  for (std::size_t j = i + 1; j <= end_index; ++j) {
    const double p = best_pdop_augmented(anchors, candidate, path[j],
                                         params.rho_max);
    const double weight = std::log1p(distance(path[j], path[i]));
    y += std::min(p, kPdopClamp) * weight;
  }
  return y;
}

namespace {

// one threshold check; returns the capped excess above p_work
double excess(double pdop_value, double p_work) {
  if (pdop_value <= p_work) return 0.0;
  return std::min(pdop_value - p_work, kViolationCap);
}

}  // namespace

ConstraintReport placement_constraints(std::span<const Point2> candidate,
                                       const AnchorSet& anchors,
                                       const ExplorationPath& path,
                                       std::size_t i, std::size_t end_index,
                                       const GanpParams& params) {
  ConstraintReport report;

  if (!candidate.empty()) {
    const ManeuverPath maneuver = plan_maneuver(candidate, path, i);
    // walk the maneuver with the anchor set as it evolves; placements join
    // the set the moment the robot reaches them
    std::vector<Point2> placed;
    placed.reserve(candidate.size());
    std::size_t next_placement = 0;
    for (std::size_t leg = 0; leg + 1 < maneuver.waypoints.size(); ++leg) {
      const auto samples = discretize(maneuver.waypoints[leg],
                                      maneuver.waypoints[leg + 1],
                                      params.check_step);
      for (std::size_t si = 1; si < samples.size(); ++si) {
        const double p =
            best_pdop_augmented(anchors, placed, samples[si], params.rho_max);
        if (p > params.p_work) {
          report.maneuver_ok = false;
          report.violation += excess(p, params.p_work);
        }
      }
      while (next_placement < maneuver.placements.size() &&
             maneuver.placements[next_placement].waypoint_index == leg + 1) {
        const Point2 ap = maneuver.placements[next_placement].position;
        // condition (i): the robot must still be well-positioned when it
        // drops the anchor, before the anchor itself starts ranging
        const double p = best_pdop_augmented(anchors, placed, ap, params.rho_max);
        if (p > params.p_work) {
          report.anchor_points_ok = false;
          report.violation += excess(p, params.p_work);
        }
        placed.push_back(ap);
        ++next_placement;
      }
    }
  }

  for (std::size_t j = i; j <= end_index; ++j) {
    const double p =
        best_pdop_augmented(anchors, candidate, path[j], params.rho_max);
    if (p > params.p_work) {
      report.forecast_ok = false;
      report.violation += excess(p, params.p_work);
    }
  }
  return report;
}

namespace {

struct Slot {
  bool occupied = false;
  double u = 0.0;  // normalized along-chord coordinate in [0,1]
  double v = 0.0;  // normalized across coordinate in [0,1]
};

struct Individual {
  std::vector<Slot> slots;
  double fitness = kInf;
  ConstraintReport report;
};

// lexicographic (feasible first, then fitness / violation)
bool better(const Individual& a, const Individual& b) {
  const bool fa = a.report.feasible();
  const bool fb = b.report.feasible();
  if (fa != fb) return fa;
  if (fa) return a.fitness < b.fitness;
  return a.report.violation < b.report.violation;
}

std::vector<Point2> slots_to_world(const std::vector<Slot>& slots,
                                   const SubareaSet& subareas) {
  std::vector<Point2> out;
  for (std::size_t j = 0; j < slots.size(); ++j) {
    if (!slots[j].occupied) continue;
    const SearchRegion& region = subareas.subareas[j];
    out.push_back(region.local_to_world(
        slots[j].u * region.chord_length(),
        (slots[j].v - 0.5) * region.width));
  }
  return out;
}

class GaRun {
public:
  GaRun(const AnchorSet& anchors, const ExplorationPath& path, std::size_t i,
        std::size_t end_index, const SubareaSet& subareas,
        const GanpParams& params, int anchor_count, std::uint64_t seed)
      : anchors_(anchors), path_(path), i_(i), end_(end_index),
        subareas_(subareas), params_(params), count_(anchor_count),
        engine_(seed) {}

  Individual run() {
    const int pop_size = params_.ga.population;
    std::vector<Individual> pop(static_cast<std::size_t>(pop_size));
    for (auto& ind : pop) {
      ind.slots = random_slots();
      evaluate(ind);
    }
    Individual best = *std::min_element(pop.begin(), pop.end(), better);
    int stale = 0;
    std::vector<Individual> next;
    next.reserve(pop.size());
    for (int gen = 0; gen < params_.ga.generations; ++gen) {
      std::vector<std::size_t> order(pop.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return better(pop[a], pop[b]);
                       });
      next.clear();
      for (int e = 0; e < params_.ga.elite_count; ++e)
        next.push_back(pop[order[static_cast<std::size_t>(e)]]);
      while (next.size() < pop.size()) {
        const Individual& p1 = tournament(pop);
        const Individual& p2 = tournament(pop);
        Individual child;
        child.slots = crossover(p1.slots, p2.slots);
        repair(child.slots);
        mutate(child.slots);
        evaluate(child);
        next.push_back(std::move(child));
      }
      pop.swap(next);
      const Individual& gen_best =
          *std::min_element(pop.begin(), pop.end(), better);
      if (better(gen_best, best)) {
        best = gen_best;
        stale = 0;
      } else if (++stale >= params_.ga.stall_generations) {
        break;
      }
    }
    return best;
  }

  const SubareaSet& subareas() const { return subareas_; }

private:
  std::vector<Slot> random_slots() {
    std::vector<Slot> slots(subareas_.subareas.size());
    std::vector<std::size_t> idx(slots.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), engine_);
    for (int k = 0; k < count_; ++k) {
      Slot& s = slots[idx[static_cast<std::size_t>(k)]];
      s.occupied = true;
      s.u = uniform_(engine_);
      s.v = uniform_(engine_);
    }
    return slots;
  }

  void evaluate(Individual& ind) {
    const auto world = slots_to_world(ind.slots, subareas_);
    ind.report = placement_constraints(world, anchors_, path_, i_, end_, params_);
    ind.fitness = placement_fitness(world, anchors_, path_, i_, end_, params_);
  }

  const Individual& tournament(const std::vector<Individual>& pop) {
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    const Individual* best = &pop[pick(engine_)];
    for (int k = 1; k < 3; ++k) {
      const Individual& other = pop[pick(engine_)];
      if (better(other, *best)) best = &other;
    }
    return *best;
  }

  std::vector<Slot> crossover(const std::vector<Slot>& a,
                              const std::vector<Slot>& b) {
    std::vector<Slot> child(a.size());
    if (uniform_(engine_) > params_.ga.crossover_rate) {
      child = a;
      return child;
    }
    for (std::size_t j = 0; j < a.size(); ++j)
      child[j] = coin_(engine_) ? a[j] : b[j];
    return child;
  }

  // crossover can change the occupied count; bring it back to exactly c
  void repair(std::vector<Slot>& slots) {
    std::vector<std::size_t> occupied, empty;
    for (std::size_t j = 0; j < slots.size(); ++j)
      (slots[j].occupied ? occupied : empty).push_back(j);
    while (static_cast<int>(occupied.size()) > count_) {
      std::uniform_int_distribution<std::size_t> pick(0, occupied.size() - 1);
      const std::size_t k = pick(engine_);
      slots[occupied[k]].occupied = false;
      empty.push_back(occupied[k]);
      occupied.erase(occupied.begin() + static_cast<std::ptrdiff_t>(k));
    }
    while (static_cast<int>(occupied.size()) < count_) {
      std::uniform_int_distribution<std::size_t> pick(0, empty.size() - 1);
      const std::size_t k = pick(engine_);
      Slot& s = slots[empty[k]];
      s.occupied = true;
      s.u = uniform_(engine_);
      s.v = uniform_(engine_);
      occupied.push_back(empty[k]);
      empty.erase(empty.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }

  void mutate(std::vector<Slot>& slots) {
    for (auto& s : slots) {
      if (!s.occupied) continue;
      if (uniform_(engine_) < params_.ga.mutation_rate) {
        s.u = std::clamp(s.u + 0.15 * normal_(engine_), 0.0, 1.0);
        s.v = std::clamp(s.v + 0.15 * normal_(engine_), 0.0, 1.0);
      }
    }
  }

  const AnchorSet& anchors_;
  const ExplorationPath& path_;
  std::size_t i_;
  std::size_t end_;
  const SubareaSet& subareas_;
  const GanpParams& params_;
  int count_;
  RngEngine engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::bernoulli_distribution coin_{0.5};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace

PlacementPlan optimize_placement(const AnchorSet& anchors,
                                 const ExplorationPath& path, std::size_t i,
                                 const GanpParams& params) {
  params.validate();
  const double slice_m = params.horizon / params.subarea_count;

  // shrink the horizon one subarea at a time when the far region is
  // infeasible, forcing placement nearer the robot
  for (int n_eff = params.subarea_count; n_eff >= 1; --n_eff) {
    const double horizon_m = slice_m * n_eff;
    const std::size_t end = horizon_end_index(path, i, horizon_m);
    if (end <= i) continue;
    SubareaSet subareas;
    try {
      const SearchRegion region =
          grow_search_region(path, i, end - i, params.region_width);
      subareas = split_subareas(region, static_cast<std::size_t>(n_eff),
                                params.check_step);
    } catch (const Error&) {
      continue;  // chord too short for this many slices near the path end
    }

    const int max_count = std::min(4, n_eff);
    for (int c = 1; c <= max_count; ++c) {
      const std::uint64_t seed = derive_seed(
          params.ga.seed,
          static_cast<std::uint64_t>(n_eff) * 16 + static_cast<std::uint64_t>(c));
      GaRun ga(anchors, path, i, end, subareas, params, c, seed);
      const Individual best = ga.run();
      if (best.report.feasible()) {
        PlacementPlan plan;
        plan.anchors = slots_to_world(best.slots, subareas);
        plan.resume_index = i;
        plan.fitness_value = best.fitness;
        plan.feasibility = best.report;
        plan.horizon_end = end;
        return plan;
      }
    }
  }
  throw InfeasibleRegionError(
      "no feasible placement with <= 4 anchors from viapoint " +
      std::to_string(i) + ", horizon exhausted");
}

}  // namespace anchorsim
