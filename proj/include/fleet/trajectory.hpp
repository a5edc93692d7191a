#pragma once

#include <vector>

#include "fleet/dubins.hpp"
#include "fleet/physics.hpp"
#include "fleet/schedule.hpp"
#include "fleet/types.hpp"

namespace fleet {

/// Trapezoidal speed reference over a fixed duration: ramp v0 -> cruise,
/// hold, ramp cruise -> vf, with ramp durations chosen so the profile covers
/// exactly the required distance.
struct SpeedProfile {
    double v0 = 0.0;
    double vf = 0.0;
    double cruise = 0.0;
    double t_accel = 0.0;
    double t_decel = 0.0;
    double duration = 0.0;
    bool valid = false;

    double speed_at(double t) const;
    double accel_at(double t) const;

    /// Solves ramp durations for the given cruise speed and ramp split
    /// (fraction of the surplus assigned to the entry ramp). Requires
    /// cruise >= max(v0, vf) and cruise * duration >= distance.
    static SpeedProfile solve(double distance, double duration, double v0, double vf,
                              double cruise, double split);
};

struct TrajectoryOptions {
    double v_avg_fraction = 0.5;  // v_avg for the timing law, as a fraction of v_max
    double dt = 0.01;             // integration step, s
    bool regen_enabled = true;
    bool return_to_depot = true;
    int descent_sweeps = 2;       // coordinate-descent passes over (cruise, split)
    int scan_points = 7;          // candidates per coordinate scan
    double ramp_margin = 0.85;    // fraction of peak drive/brake authority usable by ramps
    double start_soc = 1.0;
};

/// One waypoint-to-waypoint phase: Dubins geometry, timing-law duration,
/// optimized speed profile and the realized state/control/power samples.
struct SegmentPlan {
    DubinsPath path;
    double planned_duration = 0.0;  // DL / v_avg
    SpeedProfile profile;
    double payload = 0.0;
    PhaseKind phase = PhaseKind::unloaded;
    TaskId task = -1;  // -1 for depot legs
    double start_time = 0.0;  // route-relative
    std::vector<TrajectorySample> samples;
    double energy = 0.0;
    double objective = 0.0;
    double realized_duration = 0.0;

    double end_time() const { return start_time + realized_duration; }
};

struct RouteTrajectory {
    RobotId robot = 0;
    std::vector<SegmentPlan> segments;
    double total_energy = 0.0;
    double objective_value = 0.0;
    double total_duration = 0.0;
    RobotState final_state;

    /// State at route-relative time t (nearest sample at or before t).
    /// Before the start returns the initial state, after the end the final.
    RobotState state_at(double t) const;
    /// Integral of battery power up to route-relative time t.
    double energy_up_to(double t) const;
    /// Arc-length progress fraction of the whole route at time t, in [0,1].
    double progress_at(double t) const;
};

/// Depletion mid-route carries the trajectory planned up to the fault.
struct RouteDepletionFault : DepletionFault {
    RouteTrajectory partial;
    RouteDepletionFault(RobotId r, double time, RouteTrajectory p)
        : DepletionFault(r, time), partial(std::move(p)) {}
};

/// Plans and optimizes a single phase between two poses. Boundary speeds may
/// be nonzero; the profile search minimizes the physics-integrated running
/// cost subject to the timing law and actuator-feasible ramps.
SegmentPlan plan_segment(const Pose& start, const Pose& goal, double v0, double vf,
                         double payload, double soc0, const RobotParams& params,
                         const BatteryParams& batt, const FrictionField& field,
                         const CostWeights& weights, const TrajectoryOptions& options);

/// Kept for tests and refinement: evaluates one candidate profile for a
/// phase without running the descent.
SegmentPlan realize_profile(const Pose& start, const DubinsPath& path, double duration,
                            const SpeedProfile& profile, double payload, double soc0,
                            const RobotParams& params, const BatteryParams& batt,
                            const FrictionField& field, const CostWeights& weights,
                            const TrajectoryOptions& options, bool record_samples);

/// Stage-2 route generation: waypoint chain from the task sequence, Dubins
/// geometry per phase, timing-law durations, per-phase profile optimization.
/// Waypoints must lie inside the workspace and outside keepout regions.
RouteTrajectory optimize_route(const Vec2& depot, const std::vector<Task>& sequence,
                               const RobotParams& params, const BatteryParams& batt,
                               const FrictionField& field, const Workspace& workspace,
                               const CostWeights& weights, const TrajectoryOptions& options);

/// As optimize_route but starting from an arbitrary pose/SOC, used by the
/// rescheduler to re-plan from mid-run states. Depot return applies only if
/// options.return_to_depot and return_depot is provided.
RouteTrajectory optimize_route_from(const Pose& start, double start_soc,
                                    const std::vector<Task>& sequence,
                                    const Vec2* return_depot, const RobotParams& params,
                                    const BatteryParams& batt, const FrictionField& field,
                                    const Workspace& workspace, const CostWeights& weights,
                                    const TrajectoryOptions& options);

/// Optimized single-segment objective with pinned boundary speeds: the exact
/// ordered-pair cost oracle. Straight-line heading at both ends.
double ordered_pair_cost(const Vec2& a, const Vec2& b, double payload, double v_minus,
                         double v_plus, const RobotParams& params, const BatteryParams& batt,
                         const FrictionField& field, const CostWeights& weights,
                         const TrajectoryOptions& options);

}  // namespace fleet
