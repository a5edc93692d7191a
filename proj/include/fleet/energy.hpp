#pragma once

#include <functional>
#include <vector>

#include "fleet/friction.hpp"
#include "fleet/types.hpp"

namespace fleet {

/// Standard gravity, m/s^2.
inline constexpr double kGravity = 9.80665;

/// One straight transit leg with payload and boundary speeds.
struct SegmentSpec {
    Vec2 from;
    Vec2 to;
    double payload = 0.0;  // kg
    double v0 = 0.0;       // m/s
    double vf = 0.0;       // m/s
};

/// Closed-form segment energy: friction work mu*(M+w)*g*s plus the kinetic
/// change, both divided by drivetrain efficiency. A decelerating segment
/// recovers regen_fraction of the kinetic drop when regeneration is enabled
/// (the recovered term is not divided by efficiency); with regeneration
/// disabled the raw value is clamped at zero.
double segment_energy(const SegmentSpec& spec, const RobotParams& params, double mu,
                      bool regen_enabled);

/// O(1) bid surrogate: unloaded transit energy from the robot's end position
/// to the pickup plus loaded execution energy, with the kinetic term clamped
/// at zero. Boundary speeds default to rest, which zeroes the kinetic terms.
double bid_energy_approx(const Vec2& robot_end, const Task& task, const RobotParams& params,
                         double mu, double v0 = 0.0, double vf = 0.0);

/// Zone-aware variant of the bid: friction work is the exact straight-line
/// path integral of mu across zone crossings.
double bid_energy_zoned(const Vec2& robot_end, const Task& task, const RobotParams& params,
                        const FrictionField& field);

/// Closed-form route energy: alternating unloaded transit and loaded
/// execution legs from the depot through the sequence, each leg priced by
/// segment_energy with rest boundaries. Friction work per leg uses the exact
/// straight-line integral of mu, so zoned and uniform fields are handled
/// consistently and the total is additive in legs.
double route_energy_closed_form(const Vec2& depot, const std::vector<Task>& sequence,
                                const RobotParams& params, const FrictionField& field,
                                bool regen_enabled, bool return_to_depot = false);

/// Ordered-pair cost oracle: cost of finishing task a and then executing
/// task b (unloaded transit a.dropoff -> b.pickup plus loaded b.pickup ->
/// b.dropoff). Diagonal entries are the loaded leg only.
using PairCostFn = std::function<double(const Task& a, const Task& b)>;

/// Dense transition-cost matrix A(a,b) over the task list under the given
/// oracle. Asymmetric by construction; never symmetrized.
std::vector<std::vector<double>> transition_matrix(const std::vector<Task>& tasks,
                                                   const PairCostFn& oracle);

/// Closed-form ordered-pair oracle over a friction field (rest boundaries).
PairCostFn closed_form_pair_cost(const RobotParams& params, const FrictionField& field,
                                 bool regen_enabled);

}  // namespace fleet
