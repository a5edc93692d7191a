#include "fleet/rescheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fleet/energy.hpp"

namespace fleet {

TriggerDecision evaluate_triggers(const std::vector<RobotProgress>& fleet,
                                  const std::vector<DisruptionEvent>& events_at_t,
                                  const TriggerConfig& config, double t) {
    TriggerDecision d;
    for (const auto& ev : events_at_t) {
        if (ev.kind == DisruptionKind::fault) {
            d.fault = true;
            d.affected_robots.push_back(ev.robot);
        } else if (ev.kind == DisruptionKind::priority_task && ev.task) {
            d.priority = true;
            d.new_tasks.push_back(*ev.task);
        }
    }
    for (const auto& r : fleet) {
        if (!r.active) continue;
        if (r.predicted_energy < 1.0) continue;  // prediction floor
        double rel = std::fabs(r.actual_energy - r.predicted_energy) / r.predicted_energy;
        if (rel > config.delta && t - r.last_deviation_reschedule >= config.dt_min) {
            d.deviation = true;
            if (std::find(d.affected_robots.begin(), d.affected_robots.end(), r.id) ==
                d.affected_robots.end())
                d.affected_robots.push_back(r.id);
        }
    }
    d.fired = d.fault || d.priority || d.deviation;
    return d;
}

ReschedulePlan warm_start_reschedule(const std::vector<RobotProgress>& fleet,
                                     const std::map<RobotId, std::vector<TaskId>>& completed,
                                     const TriggerDecision& decision,
                                     const std::map<TaskId, Task>& tasks_by_id,
                                     BidMetric metric, const BidContext& ctx,
                                     bool cold_start) {
    ReschedulePlan plan;

    auto affected = [&](RobotId id) {
        return std::find(decision.affected_robots.begin(), decision.affected_robots.end(),
                         id) != decision.affected_robots.end();
    };
    auto faulted_now = [&](const RobotProgress& r) { return decision.fault && affected(r.id); };

    // Build the re-auction pool and the retained remaining sequences.
    std::vector<Task> pool;
    for (const auto& r : fleet) {
        bool strip = cold_start || affected(r.id);
        std::vector<TaskId> retained;
        if (strip) {
            for (TaskId tid : r.unstarted) pool.push_back(tasks_by_id.at(tid));
            // a faulted robot also gives up its in-progress task
            if (faulted_now(r) && r.in_progress) pool.push_back(tasks_by_id.at(*r.in_progress));
        } else {
            retained = r.unstarted;
        }
        plan.new_remaining[r.id] = std::move(retained);
    }
    for (const auto& t : decision.new_tasks) pool.push_back(t);
    std::sort(pool.begin(), pool.end(), [](const Task& a, const Task& b) { return a.id < b.id; });

    // Active robots bid from the end of whatever they retain.
    std::vector<Bidder> bidders;
    for (const auto& r : fleet) {
        if (!r.active || faulted_now(r)) continue;
        Vec2 q = r.committed_end;
        const auto& retained = plan.new_remaining[r.id];
        if (!retained.empty()) q = tasks_by_id.at(retained.back()).dropoff;
        bidders.push_back({r.id, q, r.params});
    }
    if (bidders.empty() && !pool.empty()) {
        std::string orphans;
        for (const auto& t : pool) orphans += " " + std::to_string(t.id);
        throw std::runtime_error("reschedule infeasible, no active robot for tasks:" + orphans);
    }

    if (!pool.empty()) {
        auto [schedule, trace] = run_auction(bidders, pool, metric, ctx);
        for (const auto& round : trace.rounds)
            plan.new_remaining[round.winner].push_back(round.task);
        plan.trace = std::move(trace);
        for (const auto& t : pool) plan.reassigned.push_back(t.id);
    }

    // Full view for partition validation: completed prefix + in-progress +
    // remaining per robot.
    for (const auto& r : fleet) {
        std::vector<TaskId> seq;
        auto done = completed.find(r.id);
        if (done != completed.end()) seq = done->second;
        if (r.in_progress && !(faulted_now(r)))
            seq.push_back(*r.in_progress);
        std::size_t prefix = seq.size();
        for (TaskId tid : plan.new_remaining[r.id]) seq.push_back(tid);
        plan.full_view.sequences[r.id] = std::move(seq);
        plan.full_view.cursor[r.id] = prefix;
        plan.full_view.predicted_energy[r.id] = 0.0;
    }
    return plan;
}

long zeno_budget(double horizon, int n_robots, const TriggerConfig& config, long fault_count,
                 long priority_count) {
    if (horizon <= 0.0) throw std::invalid_argument("zeno_budget: horizon must be > 0");
    long per_robot = static_cast<long>(std::floor(horizon / config.dt_min)) + 1;
    return fault_count + priority_count + static_cast<long>(n_robots) * per_robot;
}

CostToGo track_cost_to_go(const std::vector<RobotProgress>& fleet,
                          const std::map<TaskId, Task>& tasks_by_id,
                          const FrictionField& field, double rho, bool regen_enabled,
                          int reschedule_index) {
    CostToGo v;
    v.reschedule_index = reschedule_index;
    for (const auto& r : fleet) {
        if (!r.active) continue;
        std::vector<Task> chain;
        if (r.in_progress) chain.push_back(tasks_by_id.at(*r.in_progress));
        for (TaskId tid : r.unstarted) chain.push_back(tasks_by_id.at(tid));
        v.unstarted_count += static_cast<int>(r.unstarted.size());
        if (chain.empty()) continue;
        v.value += route_energy_closed_form(r.position, chain, r.params, field, regen_enabled,
                                            false);
    }
    v.value += rho * v.unstarted_count;
    return v;
}

}  // namespace fleet
