#pragma once

#include <vector>

#include "fleet/trajectory.hpp"

namespace fleet {

/// Interval where a robot pair is closer than the safety distance.
struct ConflictWindow {
    RobotId robot_a = 0;
    RobotId robot_b = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    double min_separation = 0.0;
};

/// Quadratic soft barrier: zero at or beyond d_safe, one at contact.
double proximity_penalty(const Vec2& pos_i, const Vec2& pos_j, double d_safe);

/// All maximal windows where the sampled pairwise separation drops below
/// d_safe. Trajectories share the common route clock (all start at t=0);
/// robots are only considered while actively executing. Windows separated by
/// less than 2*dt are merged.
std::vector<ConflictWindow> detect_conflicts(const std::vector<RouteTrajectory>& trajectories,
                                             double d_safe, double dt = 0.01);

/// Serial reference for the pair scan; kept as the oracle for the
/// OpenMP-parallel detect_conflicts.
std::vector<ConflictWindow> detect_conflicts_serial(
    const std::vector<RouteTrajectory>& trajectories, double d_safe, double dt = 0.01);

/// Integral of the pairwise proximity penalty over all pairs (sampled at dt).
double total_penalty_integral(const std::vector<RouteTrajectory>& trajectories, double d_safe,
                              double dt = 0.01);

struct RefineResult {
    std::vector<RouteTrajectory> trajectories;
    double penalty_before = 0.0;
    double penalty_after = 0.0;
    std::vector<ConflictWindow> residual;  // conflicts left after the budget
};

struct RefineContext {
    const RobotParams* params;
    const BatteryParams* batt;
    const FrictionField* field;
    const CostWeights* weights;
    TrajectoryOptions options;
    double d_safe = 0.5;
    int max_passes = 3;
};

/// Post-allocation conflict resolution: retimes the speed profiles of
/// conflicting segments (the schedule is never touched). The returned
/// trajectories have total penalty integral no greater than the input's;
/// windows that survive the pass budget are reported as residual.
RefineResult refine(std::vector<RouteTrajectory> trajectories,
                    const std::vector<ConflictWindow>& conflicts, double lambda_c,
                    const RefineContext& ctx);

}  // namespace fleet
