#include "fleet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace fleet {

std::vector<Bidder> scenario_bidders(const Scenario& scenario) {
    std::vector<Bidder> bidders;
    for (std::size_t i = 0; i < scenario.robots.size(); ++i)
        bidders.push_back({static_cast<RobotId>(i), scenario.robots[i].depot,
                           scenario.robots[i].params});
    return bidders;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Per-robot execution bookkeeping. `plan` is the committed future from
// `plan_start` on; executed segments live in `history`.
struct RobotRun {
    RobotId id = 0;
    RobotSpec spec;
    Pose pose;  // pose at plan start
    double soc = 1.0;
    double plan_start = 0.0;
    RouteTrajectory plan;
    std::vector<double> segment_pred;  // closed-form prediction per plan segment
    std::vector<TaskId> remaining;     // first entry may already be under way
    std::vector<TaskId> completed;
    bool faulted = false;
    double committed_energy = 0.0;
    double plan_pred_total = 0.0;
    double last_dev_reschedule = -1e18;
    RobotHistory history;

    double plan_end() const { return plan_start + plan.total_duration; }
};

std::vector<Task> resolve(const std::vector<TaskId>& ids,
                          const std::map<TaskId, Task>& by_id) {
    std::vector<Task> out;
    out.reserve(ids.size());
    for (TaskId i : ids) out.push_back(by_id.at(i));
    return out;
}

// Straight-line closed-form energy per plan segment (rest boundaries, so the
// kinetic term vanishes); this is the E_pred the deviation monitor tracks.
std::vector<double> segment_predictions(const RobotRun& run, const FrictionField& field,
                                        const std::map<TaskId, Task>& by_id) {
    std::vector<double> preds;
    Vec2 at = run.pose.position;
    for (const auto& seg : run.plan.segments) {
        Vec2 to = seg.samples.empty()
                      ? at
                      : Vec2{seg.samples.back().state.x, seg.samples.back().state.y};
        double payload =
            seg.phase == PhaseKind::loaded && seg.task >= 0 ? by_id.at(seg.task).payload : 0.0;
        double friction = field.line_integral_mu(at, to) *
                          (run.spec.params.mass + payload) * kGravity;
        preds.push_back(friction / run.spec.params.efficiency);
        at = to;
    }
    return preds;
}

void replan(RobotRun& run, const Scenario& scenario, const PipelineOptions& options,
            const std::map<TaskId, Task>& by_id) {
    const Vec2* depot = &scenario.robots[run.id].depot;
    TrajectoryOptions topt = options.trajectory;
    topt.return_to_depot = scenario.return_to_depot;
    run.plan = optimize_route_from(run.pose, run.soc, resolve(run.remaining, by_id), depot,
                                   run.spec.params, run.spec.battery, scenario.friction,
                                   scenario.workspace, options.weights, topt);
    run.plan.robot = run.id;
    run.segment_pred = segment_predictions(run, scenario.friction, by_id);
    run.plan_pred_total = 0.0;
    for (double p : run.segment_pred) run.plan_pred_total += p;
}

// index of the first segment not finished by local time tl
std::size_t spanning_segment(const RouteTrajectory& plan, double tl) {
    std::size_t i = 0;
    while (i < plan.segments.size() && plan.segments[i].end_time() <= tl + 1e-12) ++i;
    return i;
}

// Freeze the executed part of the plan into history and put the robot at a
// well-defined handoff. hard_stop parks mid-segment (faults); otherwise the
// segment under way finishes first and the handoff is its end waypoint.
void commit_until(RobotRun& run, double tl, bool hard_stop) {
    std::size_t keep = spanning_segment(run.plan, tl);
    double handoff_local;
    Pose handoff_pose;

    if (keep >= run.plan.segments.size()) {
        handoff_local = run.plan.total_duration;
        handoff_pose = {run.plan.final_state.position(), run.plan.final_state.heading};
    } else if (hard_stop) {
        handoff_local = tl;
        RobotState s = run.plan.state_at(tl);
        handoff_pose = {{s.x, s.y}, s.heading};
    } else {
        const SegmentPlan& seg = run.plan.segments[keep];
        handoff_local = seg.end_time();
        RobotState s = run.plan.state_at(handoff_local);
        handoff_pose = {{s.x, s.y}, s.heading};
        ++keep;
    }

    double committed = run.plan.energy_up_to(handoff_local);
    run.soc = keep > 0 || hard_stop ? run.plan.state_at(handoff_local).soc : run.soc;
    for (std::size_t i = 0; i < keep; ++i) {
        SegmentPlan seg = run.plan.segments[i];
        if (seg.phase == PhaseKind::loaded && seg.task >= 0) run.completed.push_back(seg.task);
        seg.start_time += run.plan_start;  // absolute time in history
        run.history.segments.push_back(std::move(seg));
    }

    std::set<TaskId> done(run.completed.begin(), run.completed.end());
    std::vector<TaskId> rest;
    for (TaskId t : run.remaining)
        if (!done.count(t)) rest.push_back(t);
    run.remaining = std::move(rest);

    run.committed_energy += committed;
    run.pose = handoff_pose;
    run.plan_start += handoff_local;
    run.plan = RouteTrajectory{};
    run.plan.robot = run.id;
    run.plan.final_state = {handoff_pose.position.x, handoff_pose.position.y,
                            handoff_pose.heading, 0.0, run.soc};
    run.segment_pred.clear();
    run.plan_pred_total = 0.0;
}

// E_pred pro-rated to local time tl: completed segments count fully, the
// segment under way contributes its arc fraction.
double prorated_prediction(const RobotRun& run, double tl) {
    double pred = 0.0;
    for (std::size_t i = 0; i < run.plan.segments.size(); ++i) {
        const auto& seg = run.plan.segments[i];
        if (tl >= seg.end_time()) {
            pred += run.segment_pred[i];
            continue;
        }
        if (tl > seg.start_time && !seg.samples.empty() && seg.path.length() > 0.0) {
            double step = seg.realized_duration > 0.0 && seg.samples.size() > 1
                              ? seg.realized_duration / (seg.samples.size() - 1)
                              : 0.0;
            if (step > 0.0) {
                std::size_t idx = std::min(
                    seg.samples.size() - 1,
                    static_cast<std::size_t>(std::max(0.0, (tl - seg.start_time) / step)));
                pred += run.segment_pred[i] * (seg.samples[idx].arc_length / seg.path.length());
            }
        }
        break;
    }
    return pred;
}

RobotProgress snapshot(const RobotRun& run, double t, bool with_deviation) {
    RobotProgress p;
    p.id = run.id;
    p.active = !run.faulted;
    p.params = run.spec.params;
    p.last_deviation_reschedule = run.last_dev_reschedule;

    double tl = t - run.plan_start;
    RobotState s = run.plan.segments.empty() || tl <= 0.0
                       ? RobotState{run.pose.position.x, run.pose.position.y,
                                    run.pose.heading, 0.0, run.soc}
                       : run.plan.state_at(tl);
    p.position = {s.x, s.y};
    p.soc = s.soc;

    // split the remaining chain into the task under way and the unstarted rest
    std::set<TaskId> begun;
    if (!run.plan.segments.empty() && tl > 0.0) {
        std::size_t span = spanning_segment(run.plan, tl);
        for (std::size_t i = 0; i <= span && i < run.plan.segments.size(); ++i)
            if (run.plan.segments[i].task >= 0) begun.insert(run.plan.segments[i].task);
    }
    p.committed_end = p.position;
    for (TaskId tid : run.remaining) {
        if (!p.in_progress && begun.count(tid)) {
            p.in_progress = tid;
        } else {
            p.unstarted.push_back(tid);
        }
    }
    if (p.in_progress) {
        for (const auto& seg : run.plan.segments)
            if (seg.task == *p.in_progress && seg.phase == PhaseKind::loaded &&
                !seg.samples.empty())
                p.committed_end = {seg.samples.back().state.x, seg.samples.back().state.y};
    }

    if (with_deviation && !run.plan.segments.empty() && tl > 0.0) {
        p.actual_energy = run.plan.energy_up_to(tl);
        p.predicted_energy = prorated_prediction(run, tl);
    }
    return p;
}

std::vector<RouteTrajectory> refine_routes(std::vector<RouteTrajectory> routes,
                                           const Scenario& scenario,
                                           const PipelineOptions& options,
                                           std::vector<ConflictWindow>* residual) {
    auto conflicts = detect_conflicts(routes, options.d_safe, options.trajectory.dt);
    if (conflicts.empty()) return routes;
    RefineContext ctx;
    ctx.params = &scenario.robots.front().params;
    ctx.batt = &scenario.robots.front().battery;
    ctx.field = &scenario.friction;
    ctx.weights = &options.weights;
    ctx.options = options.trajectory;
    ctx.options.return_to_depot = scenario.return_to_depot;
    ctx.d_safe = options.d_safe;
    RefineResult rr = refine(std::move(routes), conflicts, options.weights.lambda_c, ctx);
    if (residual) *residual = rr.residual;
    return std::move(rr.trajectories);
}

}  // namespace

double schedule_fleet_energy(const Scenario& scenario, const Schedule& schedule,
                             const PipelineOptions& options) {
    std::map<TaskId, Task> by_id;
    for (const auto& t : scenario.tasks) by_id[t.id] = t;

    TrajectoryOptions topt = options.trajectory;
    topt.return_to_depot = scenario.return_to_depot;

    std::vector<RouteTrajectory> routes(scenario.robots.size());
#pragma omp parallel for schedule(dynamic)
    for (long long r = 0; r < static_cast<long long>(scenario.robots.size()); ++r) {
        std::vector<Task> seq;
        auto it = schedule.sequences.find(static_cast<RobotId>(r));
        if (it != schedule.sequences.end())
            for (TaskId tid : it->second) seq.push_back(by_id.at(tid));
        routes[r] = optimize_route(scenario.robots[r].depot, seq, scenario.robots[r].params,
                                   scenario.robots[r].battery, scenario.friction,
                                   scenario.workspace, options.weights, topt);
        routes[r].robot = static_cast<RobotId>(r);
    }

    if (options.refine_collisions && routes.size() > 1)
        routes = refine_routes(std::move(routes), scenario, options, nullptr);

    double total = 0.0;
    for (const auto& r : routes) total += r.total_energy;
    return total;
}

PipelineResult run_pipeline(const Scenario& scenario, const PipelineOptions& options) {
    PipelineResult result;
    std::map<TaskId, Task> by_id;
    std::set<TaskId> all_ids;
    std::vector<Task> initial_tasks;
    for (const auto& t : scenario.tasks) {
        by_id[t.id] = t;
        all_ids.insert(t.id);
        if (t.arrival_time <= 0.0) initial_tasks.push_back(t);
    }

    // late-arriving scenario tasks enter the stream as priority arrivals
    std::vector<DisruptionEvent> stream = scenario.disruptions;
    for (const auto& t : scenario.tasks)
        if (t.arrival_time > 0.0) {
            DisruptionEvent ev;
            ev.kind = DisruptionKind::priority_task;
            ev.t = t.arrival_time;
            ev.task = t;
            stream.push_back(ev);
        }
    std::sort(stream.begin(), stream.end(),
              [](const DisruptionEvent& a, const DisruptionEvent& b) { return a.t < b.t; });

    BidContext ctx = options.bid_context(scenario);

    // stage 1: initial auction
    auto [schedule, trace] = run_auction(scenario_bidders(scenario), initial_tasks,
                                         options.metric, ctx);
    result.initial_schedule = schedule;
    result.initial_trace = std::move(trace);

    // stage 2: per-robot trajectories
    std::vector<RobotRun> runs(scenario.robots.size());
    for (std::size_t r = 0; r < runs.size(); ++r) {
        runs[r].id = static_cast<RobotId>(r);
        runs[r].spec = scenario.robots[r];
        runs[r].pose = {scenario.robots[r].depot, 0.0};
        runs[r].soc = options.trajectory.start_soc;
        runs[r].remaining = schedule.sequences[static_cast<RobotId>(r)];
        runs[r].history.id = runs[r].id;
        runs[r].plan.robot = runs[r].id;
    }
#pragma omp parallel for schedule(dynamic)
    for (long long r = 0; r < static_cast<long long>(runs.size()); ++r)
        replan(runs[r], scenario, options, by_id);

    if (options.refine_collisions && runs.size() > 1) {
        std::vector<RouteTrajectory> routes;
        for (auto& run : runs) routes.push_back(std::move(run.plan));
        routes = refine_routes(std::move(routes), scenario, options,
                               &result.residual_conflicts);
        for (std::size_t r = 0; r < runs.size(); ++r) runs[r].plan = std::move(routes[r]);
    }

    // event clock: disruption stream plus periodic deviation checks
    int reschedules = 0;
    std::size_t stream_pos = 0;
    double check_t = options.deviation_check_interval;
    const double inf = std::numeric_limits<double>::infinity();

    auto latest_end = [&]() {
        double t = 0.0;
        for (const auto& run : runs) t = std::max(t, run.plan_end());
        return t;
    };
    auto fleet_snapshot = [&](double t, bool with_dev) {
        std::vector<RobotProgress> fleet;
        fleet.reserve(runs.size());
        for (const auto& run : runs) fleet.push_back(snapshot(run, t, with_dev));
        return fleet;
    };

    while (true) {
        double next_event = stream_pos < stream.size() ? stream[stream_pos].t : inf;
        double next_check = options.monitor_deviation ? check_t : inf;
        double t = std::min(next_event, next_check);
        if (t == inf) break;
        if (stream_pos >= stream.size() && t > latest_end()) break;

        bool is_check = options.monitor_deviation && t == next_check;
        std::vector<DisruptionEvent> now;
        while (stream_pos < stream.size() && stream[stream_pos].t == t)
            now.push_back(stream[stream_pos++]);
        if (is_check) check_t += options.deviation_check_interval;

        // scripted deviation events force the indicator's energy condition
        std::vector<DisruptionEvent> hard_events;
        std::set<RobotId> forced_deviation;
        for (const auto& ev : now) {
            if (ev.kind == DisruptionKind::energy_deviation)
                forced_deviation.insert(ev.robot);
            else
                hard_events.push_back(ev);
        }

        std::vector<RobotProgress> fleet = fleet_snapshot(t, is_check);
        for (auto& p : fleet)
            if (forced_deviation.count(p.id) && p.active) {
                p.actual_energy = (1.0 + 2.0 * options.triggers.delta);
                p.predicted_energy = 1.0;
            }

        TriggerDecision decision = evaluate_triggers(fleet, hard_events, options.triggers, t);
        if (!decision.fired) continue;

        auto t0 = Clock::now();

        // freeze executed work; faulted robots stop dead, the rest divert at
        // the boundary of the segment they are in
        std::map<RobotId, std::vector<TaskId>> completed;
        for (auto& run : runs) {
            bool newly_faulted =
                decision.fault && !run.faulted &&
                std::find(decision.affected_robots.begin(), decision.affected_robots.end(),
                          run.id) != decision.affected_robots.end();
            double tl = t - run.plan_start;
            if (!run.plan.segments.empty() && tl > 0.0)
                commit_until(run, std::min(tl, run.plan.total_duration), newly_faulted);
            if (newly_faulted) {
                run.faulted = true;
                run.history.faulted = true;
            }
            completed[run.id] = run.completed;
        }

        // post-freeze snapshot: every robot sits at a handoff pose, nothing
        // is mid-leg, so the whole remaining chain counts as unstarted
        fleet = fleet_snapshot(t, false);
        for (auto& p : fleet) {
            p.unstarted = runs[p.id].remaining;
            p.in_progress.reset();
            p.committed_end = runs[p.id].pose.position;
        }

        CostToGo v_before =
            track_cost_to_go(fleet, by_id, scenario.friction, options.weights.rho,
                             options.trajectory.regen_enabled, reschedules);

        for (const auto& task : decision.new_tasks) {
            by_id[task.id] = task;
            all_ids.insert(task.id);
        }

        ReschedulePlan plan = warm_start_reschedule(fleet, completed, decision, by_id,
                                                    options.metric, ctx,
                                                    options.cold_start_reschedule);

        for (auto& run : runs) {
            if (run.faulted) {
                run.remaining.clear();
                continue;
            }
            run.remaining = plan.new_remaining[run.id];
        }
#pragma omp parallel for schedule(dynamic)
        for (long long r = 0; r < static_cast<long long>(runs.size()); ++r) {
            if (runs[r].faulted) continue;
            replan(runs[r], scenario, options, by_id);
        }
        if (decision.deviation)
            for (RobotId rid : decision.affected_robots)
                if (!runs[rid].faulted) runs[rid].last_dev_reschedule = t;

        CostToGo v_after =
            track_cost_to_go(fleet_snapshot(t, false), by_id, scenario.friction,
                             options.weights.rho, options.trajectory.regen_enabled,
                             reschedules + 1);

        EventLogEntry entry;
        entry.t = t;
        entry.kind = decision.fault     ? DisruptionKind::fault
                     : decision.priority ? DisruptionKind::priority_task
                                         : DisruptionKind::energy_deviation;
        entry.robot = decision.affected_robots.empty() ? -1 : decision.affected_robots.front();
        entry.tasks_reassigned = static_cast<int>(plan.reassigned.size());
        entry.latency_ms = ms_since(t0);
        entry.v_before = v_before.value;
        entry.v_after = v_after.value;
        result.events.push_back(entry);
        result.cost_to_go_log.push_back(v_after);
        ++reschedules;
    }

    // wind down: everything still planned executes to completion
    for (auto& run : runs) {
        if (!run.plan.segments.empty()) commit_until(run, run.plan.total_duration, false);
        run.history.energy = run.committed_energy;
        run.history.finish_time = run.plan_start;
        run.history.final_position = run.pose.position;
        result.histories.push_back(run.history);
        result.fleet_energy += run.committed_energy;
        result.makespan = std::max(result.makespan, run.plan_start);
        result.served_tasks += static_cast<int>(run.completed.size());
    }

    for (const auto& run : runs) {
        std::vector<TaskId> seq = run.completed;
        for (TaskId tid : run.remaining) seq.push_back(tid);
        result.final_schedule.sequences[run.id] = seq;
        result.final_schedule.cursor[run.id] = run.completed.size();
        result.final_schedule.predicted_energy[run.id] = 0.0;
    }
    result.reschedule_count = reschedules;
    std::set<TaskId> served;
    for (const auto& run : runs)
        for (TaskId tid : run.completed) served.insert(tid);
    result.all_tasks_served = served.size() == all_ids.size();
    return result;
}

}  // namespace fleet
