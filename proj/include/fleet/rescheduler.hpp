#pragma once

#include <map>
#include <optional>
#include <vector>

#include "fleet/auction.hpp"
#include "fleet/schedule.hpp"

namespace fleet {

enum class DisruptionKind { fault, priority_task, energy_deviation };

struct DisruptionEvent {
    DisruptionKind kind = DisruptionKind::fault;
    double t = 0.0;
    RobotId robot = -1;        // fault / deviation
    std::optional<Task> task;  // priority arrival
};

/// Per-robot snapshot the trigger logic and warm start operate on.
struct RobotProgress {
    RobotId id = 0;
    bool active = true;  // false once faulted
    Vec2 position;
    double soc = 1.0;
    double actual_energy = 0.0;     // integrated since the robot's last (re)plan
    double predicted_energy = 0.0;  // closed-form prediction pro-rated to now
    double last_deviation_reschedule = -1e18;
    std::optional<TaskId> in_progress;  // task whose legs span the current time
    std::vector<TaskId> unstarted;      // remaining tasks after the in-progress one
    Vec2 committed_end;                 // position once the retained plan finishes
    RobotParams params;
};

struct TriggerDecision {
    bool fired = false;
    bool fault = false;
    bool priority = false;
    bool deviation = false;
    std::vector<RobotId> affected_robots;  // faulted and/or deviating
    std::vector<Task> new_tasks;           // priority arrivals
};

/// Hybrid trigger evaluation at time t: faults and priority arrivals fire
/// unconditionally; the energy-deviation indicator requires a relative error
/// above config.delta and at least config.dt_min elapsed since that robot's
/// previous deviation reschedule. Predictions below 1 J are treated as
/// unavailable (no division blow-up).
TriggerDecision evaluate_triggers(const std::vector<RobotProgress>& fleet,
                                  const std::vector<DisruptionEvent>& events_at_t,
                                  const TriggerConfig& config, double t);

struct ReschedulePlan {
    Schedule full_view;  // completed prefixes + remaining sequences, for validation
    std::map<RobotId, std::vector<TaskId>> new_remaining;
    std::vector<TaskId> reassigned;  // the re-auctioned pool
    AuctionTrace trace;
};

/// Warm-start partial re-auction: completed and in-progress work is frozen;
/// the affected robots' unstarted tasks plus any new priority tasks are
/// auctioned among the active robots, each bidding from the end of its
/// retained plan. With cold_start the pool is every unstarted task fleet-wide.
/// Throws if tasks remain but no robot is active.
ReschedulePlan warm_start_reschedule(const std::vector<RobotProgress>& fleet,
                                     const std::map<RobotId, std::vector<TaskId>>& completed,
                                     const TriggerDecision& decision,
                                     const std::map<TaskId, Task>& tasks_by_id,
                                     BidMetric metric, const BidContext& ctx,
                                     bool cold_start = false);

/// Upper bound on reschedule events over a horizon of T seconds: one per
/// fault, one per priority arrival, and at most floor(T/dt_min)+1 deviation
/// events per robot.
long zeno_budget(double horizon, int n_robots, const TriggerConfig& config, long fault_count,
                 long priority_count);

struct CostToGo {
    double value = 0.0;  // J (plus rho-weighted task count)
    int unstarted_count = 0;
    int reschedule_index = 0;
};

/// Predicted remaining fleet cost: closed-form remaining-route energy from
/// each robot's current position plus rho per pending task.
CostToGo track_cost_to_go(const std::vector<RobotProgress>& fleet,
                          const std::map<TaskId, Task>& tasks_by_id,
                          const FrictionField& field, double rho, bool regen_enabled,
                          int reschedule_index);

struct EventLogEntry {
    double t = 0.0;
    DisruptionKind kind = DisruptionKind::fault;
    RobotId robot = -1;  // -1 for priority arrivals
    int tasks_reassigned = 0;
    double latency_ms = 0.0;
    double v_before = 0.0;
    double v_after = 0.0;
};

using EventLog = std::vector<EventLogEntry>;

}  // namespace fleet
