#pragma once

#include <vector>

#include "fleet/collision.hpp"
#include "fleet/rescheduler.hpp"
#include "fleet/scenario.hpp"

namespace fleet {

struct PipelineOptions {
    BidMetric metric = BidMetric::energy_closed_form;
    CostWeights weights;
    TriggerConfig triggers;
    TrajectoryOptions trajectory;
    double d_safe = 0.5;
    bool refine_collisions = true;
    bool monitor_deviation = false;       // endogenous energy-deviation triggers
    double deviation_check_interval = 1.0;  // s
    bool cold_start_reschedule = false;   // comparator: full re-auction on every trigger

    BidContext bid_context(const Scenario& sc) const {
        BidContext ctx;
        ctx.field = &sc.friction;
        ctx.batt = sc.robots.empty() ? nullptr : &sc.robots.front().battery;
        ctx.weights = &weights;
        ctx.trajectory = trajectory;
        return ctx;
    }
};

/// One executed robot history: the segments actually driven, with absolute
/// start times, ending state and total integrated energy.
struct RobotHistory {
    RobotId id = 0;
    std::vector<SegmentPlan> segments;  // start_time fields are absolute
    double energy = 0.0;
    double finish_time = 0.0;
    bool faulted = false;
    Vec2 final_position;
};

struct PipelineResult {
    Schedule initial_schedule;
    AuctionTrace initial_trace;
    Schedule final_schedule;  // completed + remaining per robot, for validation
    std::vector<RobotHistory> histories;
    EventLog events;
    std::vector<CostToGo> cost_to_go_log;
    std::vector<ConflictWindow> residual_conflicts;
    double fleet_energy = 0.0;
    double makespan = 0.0;
    int reschedule_count = 0;
    int served_tasks = 0;
    bool all_tasks_served = false;
};

/// Full two-stage pipeline with event-triggered rescheduling: auction,
/// per-robot trajectory optimization, collision refinement, then the
/// simulation clock runs the disruption stream with warm-start (or cold)
/// partial re-auctions. Deterministic for a given scenario.
PipelineResult run_pipeline(const Scenario& scenario, const PipelineOptions& options);

/// Plans and refines trajectories for a fixed schedule (no event loop) and
/// returns the fleet energy. Used to price baseline allocations under the
/// same stage-2 machinery as the auction variants.
double schedule_fleet_energy(const Scenario& scenario, const Schedule& schedule,
                             const PipelineOptions& options);

/// Bidders at their depots, as the initial auction sees the fleet.
std::vector<Bidder> scenario_bidders(const Scenario& scenario);

}  // namespace fleet
