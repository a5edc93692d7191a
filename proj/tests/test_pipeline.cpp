#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "fleet/pipeline.hpp"

using namespace fleet;

namespace {

Scenario small_scenario(int robots, int tasks, std::uint64_t seed,
                        double fault_rate = 0.0, double priority_rate = 0.0) {
    ScenarioConfig config;
    config.robot_count = robots;
    config.task_count = tasks;
    config.layout = LayoutKind::random_uniform;
    config.fault_rate = fault_rate;
    config.priority_rate = priority_rate;
    return generate_scenario(config, seed);
}

std::set<TaskId> all_ids(const Scenario& sc) {
    std::set<TaskId> ids;
    for (const auto& t : sc.tasks) ids.insert(t.id);
    for (const auto& d : sc.disruptions)
        if (d.task) ids.insert(d.task->id);
    return ids;
}

}  // namespace

TEST_CASE("undisturbed single robot: empty event log, energy equals its route") {
    Scenario sc = small_scenario(1, 4, 11);
    PipelineOptions options;
    PipelineResult res = run_pipeline(sc, options);
    CHECK(res.events.empty());
    CHECK(res.reschedule_count == 0);
    CHECK(res.all_tasks_served);
    CHECK(validate_partition(res.final_schedule, all_ids(sc)));

    double replanned = schedule_fleet_energy(sc, res.initial_schedule, options);
    CHECK(res.fleet_energy == doctest::Approx(replanned).epsilon(1e-9));
}

TEST_CASE("pipeline is deterministic end to end") {
    Scenario sc = small_scenario(3, 12, 21, 0.01, 0.01);
    PipelineOptions options;
    PipelineResult a = run_pipeline(sc, options);
    PipelineResult b = run_pipeline(sc, options);
    CHECK(a.fleet_energy == b.fleet_energy);  // bit-identical
    CHECK(a.makespan == b.makespan);
    CHECK(a.reschedule_count == b.reschedule_count);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].t == b.events[i].t);
        CHECK(a.events[i].tasks_reassigned == b.events[i].tasks_reassigned);
    }
}

TEST_CASE("scripted fault produces exactly one fault entry and full service") {
    Scenario sc = small_scenario(2, 6, 31);
    DisruptionEvent ev;
    ev.kind = DisruptionKind::fault;
    ev.t = 15.0;
    ev.robot = 1;
    sc.disruptions = {ev};

    PipelineResult res = run_pipeline(sc, PipelineOptions{});
    REQUIRE(res.events.size() == 1);
    CHECK(res.events[0].kind == DisruptionKind::fault);
    CHECK(res.events[0].robot == 1);
    CHECK(res.all_tasks_served);
    CHECK(validate_partition(res.final_schedule, all_ids(sc)));
    // the failed robot's history ends at the fault
    for (const auto& h : res.histories)
        if (h.id == 1) {
            CHECK(h.faulted);
            CHECK(h.finish_time <= 15.0 + 1e-9);
        }
}

TEST_CASE("fault migrates remaining tasks like a fresh auction over the residual") {
    // two robots; robot 1 holds two unstarted tasks when it dies at t=1
    Scenario sc = small_scenario(2, 6, 41);
    DisruptionEvent ev;
    ev.kind = DisruptionKind::fault;
    ev.t = 1.0;
    ev.robot = 1;
    sc.disruptions = {ev};
    PipelineResult res = run_pipeline(sc, PipelineOptions{});
    CHECK(res.all_tasks_served);
    // everything eventually completed by robot 0
    for (const auto& h : res.histories)
        if (h.id == 0) CHECK(h.segments.size() >= 2 * sc.tasks.size());
}

TEST_CASE("priority arrival is auctioned alone and extends one sequence") {
    Scenario sc = small_scenario(3, 6, 51);
    Task extra;
    extra.id = 100;
    extra.pickup = {5, 5};
    extra.dropoff = {15, 15};
    extra.payload = 3.0;
    extra.priority = true;
    extra.arrival_time = 10.0;
    DisruptionEvent ev;
    ev.kind = DisruptionKind::priority_task;
    ev.t = 10.0;
    ev.task = extra;
    sc.disruptions = {ev};

    PipelineResult res = run_pipeline(sc, PipelineOptions{});
    REQUIRE(res.events.size() == 1);
    CHECK(res.events[0].kind == DisruptionKind::priority_task);
    CHECK(res.events[0].tasks_reassigned == 1);
    CHECK(res.all_tasks_served);
    CHECK(res.served_tasks == 7);
    CHECK(validate_partition(res.final_schedule, all_ids(sc)));
}

TEST_CASE("scripted deviation events respect the minimum interval gate") {
    Scenario sc = small_scenario(2, 8, 61);
    auto dev = [](double t, RobotId r) {
        DisruptionEvent e;
        e.kind = DisruptionKind::energy_deviation;
        e.t = t;
        e.robot = r;
        return e;
    };
    // three forced deviations on robot 0 within 4 s: only the first and the
    // one past dt_min=5 s may fire
    sc.disruptions = {dev(2.0, 0), dev(4.0, 0), dev(8.0, 0)};
    PipelineResult res = run_pipeline(sc, PipelineOptions{});
    REQUIRE(res.events.size() == 2);
    CHECK(res.events[0].t == doctest::Approx(2.0));
    CHECK(res.events[1].t == doctest::Approx(8.0));
    for (const auto& e : res.events) CHECK(e.kind == DisruptionKind::energy_deviation);
    CHECK(res.all_tasks_served);
}

TEST_CASE("reschedule count stays within the zeno budget") {
    Scenario sc = small_scenario(3, 10, 71, 0.005, 0.05);
    PipelineOptions options;
    options.monitor_deviation = true;
    PipelineResult res = run_pipeline(sc, options);
    long faults = 0, priorities = 0;
    for (const auto& d : sc.disruptions) {
        if (d.kind == DisruptionKind::fault) ++faults;
        if (d.kind == DisruptionKind::priority_task) ++priorities;
    }
    long budget = zeno_budget(std::max(res.makespan, 1.0),
                              static_cast<int>(sc.robots.size()), options.triggers, faults,
                              priorities);
    CHECK(res.reschedule_count <= budget);
    CHECK(validate_partition(res.final_schedule, all_ids(sc)));
}

TEST_CASE("warm start stays within a sane band of the cold comparator") {
    Scenario sc = small_scenario(3, 10, 81);
    DisruptionEvent ev;
    ev.kind = DisruptionKind::fault;
    ev.t = 8.0;
    ev.robot = 0;
    sc.disruptions = {ev};

    PipelineOptions warm;
    PipelineOptions cold = warm;
    cold.cold_start_reschedule = true;
    double e_warm = run_pipeline(sc, warm).fleet_energy;
    double e_cold = run_pipeline(sc, cold).fleet_energy;
    CHECK(e_warm <= e_cold * 1.25);
}

TEST_CASE("late-arriving scenario tasks enter as priority arrivals") {
    Scenario sc = small_scenario(2, 5, 91);
    sc.tasks.push_back(Task{50, {10, 10}, {12, 12}, 2.0, true, 20.0});
    PipelineResult res = run_pipeline(sc, PipelineOptions{});
    REQUIRE(res.events.size() == 1);
    CHECK(res.events[0].kind == DisruptionKind::priority_task);
    CHECK(res.served_tasks == 6);
}

TEST_CASE("cost-to-go drops across a task-completing reschedule") {
    Scenario sc = small_scenario(2, 8, 101);
    auto dev = [](double t, RobotId r) {
        DisruptionEvent e;
        e.kind = DisruptionKind::energy_deviation;
        e.t = t;
        e.robot = r;
        return e;
    };
    sc.disruptions = {dev(10.0, 0), dev(40.0, 0), dev(70.0, 1)};
    PipelineResult res = run_pipeline(sc, PipelineOptions{});
    REQUIRE(res.cost_to_go_log.size() >= 2);
    // as tasks complete, the remaining predicted cost shrinks
    CHECK(res.cost_to_go_log.back().value < res.cost_to_go_log.front().value);
    for (const auto& v : res.cost_to_go_log) CHECK(v.value >= 0.0);
}
