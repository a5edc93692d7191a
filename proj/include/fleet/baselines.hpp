#pragma once

#include <functional>
#include <vector>

#include "fleet/auction.hpp"
#include "fleet/schedule.hpp"

namespace fleet {

enum class BaselineKind {
    B1_nearest_task,
    B2_nearest_robot_const_vel,
    B3_distance_auction,
    B4_enumeration,
};

/// How B1 picks its next assignment. The robot-centric rule (each robot in id
/// order claims its own nearest pending pickup) is the default dispatch
/// heuristic; global_pair awards the single globally closest
/// (robot end, pickup) pair per step.
enum class NearestTaskMode { robot_centric, global_pair };

/// B1: nearest-task heuristic. Trajectories are generated downstream exactly
/// as for the auction variants.
Schedule nearest_task_allocate(const std::vector<Bidder>& robots,
                               const std::vector<Task>& tasks,
                               NearestTaskMode mode = NearestTaskMode::robot_centric);

/// B2 allocation: tasks in id (arrival) order, each to the robot whose end
/// position is closest to the pickup.
Schedule nearest_robot_allocate(const std::vector<Bidder>& robots,
                                const std::vector<Task>& tasks);

/// B2 energy: straight-line legs traversed at a fixed cruise speed, battery
/// power integrated along the way (no speed-profile optimization, no kinetic
/// cost). Returns total fleet energy in J.
double const_velocity_energy(const Schedule& schedule, const std::vector<Bidder>& robots,
                             const std::vector<Vec2>& depots, const std::vector<Task>& tasks,
                             const FrictionField& field, double cruise_speed,
                             bool return_to_depot, double dt = 0.01);

/// Route cost oracle used by the enumeration baseline: cost of the given
/// ordered sequence executed by the given robot from its depot.
using RouteCostOracle =
    std::function<double(const Bidder& robot, const std::vector<Task>& ordered_seq)>;

struct EnumerationGuard {
    int max_robots = 3;
    int max_tasks = 8;
};

/// B4: exhaustive minimum over all n^m robot-to-task assignments with a fixed
/// ascending-id task ordering per robot. Ties resolve to the lexicographically
/// smallest assignment vector. Throws if the instance exceeds the guard.
std::pair<Schedule, double> enumerate_optimal(const std::vector<Bidder>& robots,
                                              const std::vector<Task>& tasks,
                                              const RouteCostOracle& oracle,
                                              const EnumerationGuard& guard = {});

/// Serial recursive reference for the enumeration kernel.
std::pair<Schedule, double> enumerate_optimal_serial(const std::vector<Bidder>& robots,
                                                     const std::vector<Task>& tasks,
                                                     const RouteCostOracle& oracle,
                                                     const EnumerationGuard& guard = {});

/// Cost of a schedule under the same oracle and ordering rule as the
/// enumeration baseline (sequences re-sorted ascending by task id).
double schedule_cost_fixed_order(const Schedule& schedule, const std::vector<Bidder>& robots,
                                 const std::vector<Task>& tasks, const RouteCostOracle& oracle);

}  // namespace fleet
