#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fleet/energy.hpp"
#include "fleet/rescheduler.hpp"

using namespace fleet;

namespace {

const FrictionField kField = FrictionField::uniform(0.02);
const BatteryParams kBatt{};
const CostWeights kWeights{};

BidContext context() {
    BidContext ctx;
    ctx.field = &kField;
    ctx.batt = &kBatt;
    ctx.weights = &kWeights;
    return ctx;
}

Task make_task(TaskId id, Vec2 p, Vec2 d, double payload = 0.0) {
    Task t;
    t.id = id;
    t.pickup = p;
    t.dropoff = d;
    t.payload = payload;
    return t;
}

RobotProgress make_progress(RobotId id, Vec2 at, std::vector<TaskId> unstarted) {
    RobotProgress p;
    p.id = id;
    p.position = at;
    p.committed_end = at;
    p.unstarted = std::move(unstarted);
    p.params = RobotParams{};
    return p;
}

}  // namespace

TEST_CASE("deviation indicator honors threshold and minimum interval") {
    TriggerConfig config;  // delta 0.10, dt_min 5 s
    RobotProgress r = make_progress(0, {0, 0}, {});
    r.predicted_energy = 100.0;

    SUBCASE("fires above threshold after the interval") {
        r.actual_energy = 112.0;
        r.last_deviation_reschedule = 0.0;
        TriggerDecision d = evaluate_triggers({r}, {}, config, 6.0);
        CHECK(d.fired);
        CHECK(d.deviation);
        CHECK(d.affected_robots == std::vector<RobotId>{0});
    }
    SUBCASE("suppressed inside the interval") {
        r.actual_energy = 112.0;
        r.last_deviation_reschedule = 0.0;
        CHECK_FALSE(evaluate_triggers({r}, {}, config, 3.0).fired);
    }
    SUBCASE("below threshold never fires") {
        r.actual_energy = 105.0;
        r.last_deviation_reschedule = -1e18;
        CHECK_FALSE(evaluate_triggers({r}, {}, config, 100.0).fired);
    }
    SUBCASE("tiny predictions are ignored") {
        r.predicted_energy = 0.5;
        r.actual_energy = 50.0;
        CHECK_FALSE(evaluate_triggers({r}, {}, config, 100.0).fired);
    }
}

TEST_CASE("fault and priority indicators fire unconditionally") {
    TriggerConfig config;
    RobotProgress r = make_progress(0, {0, 0}, {1});
    DisruptionEvent fault{DisruptionKind::fault, 4.0, 0, std::nullopt};
    TriggerDecision d = evaluate_triggers({r}, {fault}, config, 4.0);
    CHECK(d.fired);
    CHECK(d.fault);

    DisruptionEvent prio;
    prio.kind = DisruptionKind::priority_task;
    prio.t = 4.0;
    prio.task = make_task(9, {1, 1}, {2, 2});
    d = evaluate_triggers({r}, {prio}, config, 4.0);
    CHECK(d.fired);
    CHECK(d.priority);
    REQUIRE(d.new_tasks.size() == 1);
    CHECK(d.new_tasks[0].id == 9);
}

TEST_CASE("zeno budget accounting") {
    TriggerConfig config;  // dt_min 5
    CHECK(zeno_budget(60.0, 1, config, 0, 0) == 13);
    CHECK(zeno_budget(60.0, 0, config, 4, 3) == 7);
    CHECK(zeno_budget(2.0, 3, config, 2, 1) == 2 + 1 + 3);
    CHECK_THROWS_AS(zeno_budget(0.0, 1, config, 0, 0), std::invalid_argument);
}

TEST_CASE("fault reschedule migrates unstarted tasks to the healthy robot") {
    std::map<TaskId, Task> tasks;
    tasks[0] = make_task(0, {5, 0}, {6, 0});
    tasks[1] = make_task(1, {10, 0}, {11, 0});
    tasks[2] = make_task(2, {15, 0}, {16, 0});

    std::vector<RobotProgress> fleet{make_progress(0, {0, 0}, {0}),
                                     make_progress(1, {8, 0}, {1, 2})};
    TriggerDecision decision;
    decision.fired = true;
    decision.fault = true;
    decision.affected_robots = {1};

    std::map<RobotId, std::vector<TaskId>> completed{{0, {}}, {1, {}}};
    ReschedulePlan plan = warm_start_reschedule(fleet, completed, decision, tasks,
                                                BidMetric::energy_closed_form, context());

    CHECK(plan.reassigned == std::vector<TaskId>{1, 2});
    CHECK(plan.new_remaining[0] == std::vector<TaskId>{0, 1, 2});
    CHECK(plan.new_remaining[1].empty());
    CHECK(validate_partition(plan.full_view, {0, 1, 2}));

    // matches a cold auction over the residual instance with robot 0 only
    std::vector<Bidder> survivor{{0, tasks[0].dropoff, RobotParams{}}};
    // robot 0 keeps its own task first; its bid position for the pool is the
    // end of its retained chain
    auto [cold, trace] = run_auction(survivor, {tasks[1], tasks[2]},
                                     BidMetric::energy_closed_form, context());
    std::vector<TaskId> expected{0};
    for (TaskId t : cold.sequences[0]) expected.push_back(t);
    CHECK(plan.new_remaining[0] == expected);
}

TEST_CASE("faulted robot also surrenders its in-progress task") {
    std::map<TaskId, Task> tasks;
    tasks[0] = make_task(0, {5, 0}, {6, 0});
    std::vector<RobotProgress> fleet{make_progress(0, {0, 0}, {}),
                                     make_progress(1, {5, 0}, {})};
    fleet[1].in_progress = 0;
    TriggerDecision decision;
    decision.fired = true;
    decision.fault = true;
    decision.affected_robots = {1};
    std::map<RobotId, std::vector<TaskId>> completed{{0, {}}, {1, {}}};
    ReschedulePlan plan = warm_start_reschedule(fleet, completed, decision, tasks,
                                                BidMetric::energy_closed_form, context());
    CHECK(plan.reassigned == std::vector<TaskId>{0});
    CHECK(plan.new_remaining[0] == std::vector<TaskId>{0});
}

TEST_CASE("priority arrival extends exactly one sequence") {
    std::map<TaskId, Task> tasks;
    tasks[0] = make_task(0, {5, 0}, {6, 0});
    tasks[1] = make_task(1, {14, 0}, {15, 0});
    tasks[9] = make_task(9, {13, 1}, {12, 2});

    std::vector<RobotProgress> fleet{make_progress(0, {0, 0}, {0}),
                                     make_progress(1, {12, 0}, {1})};
    TriggerDecision decision;
    decision.fired = true;
    decision.priority = true;
    decision.new_tasks = {tasks[9]};

    std::map<RobotId, std::vector<TaskId>> completed{{0, {}}, {1, {}}};
    ReschedulePlan plan = warm_start_reschedule(fleet, completed, decision, tasks,
                                                BidMetric::energy_closed_form, context());
    CHECK(plan.reassigned == std::vector<TaskId>{9});
    // existing chains kept, one robot appends the new task
    int extended = 0;
    CHECK(plan.new_remaining[0].front() == 0);
    CHECK(plan.new_remaining[1].front() == 1);
    if (plan.new_remaining[0].size() == 2) ++extended;
    if (plan.new_remaining[1].size() == 2) ++extended;
    CHECK(extended == 1);
    CHECK(validate_partition(plan.full_view, {0, 1, 9}));
}

TEST_CASE("no active robots with pending tasks is an infeasibility fault") {
    std::map<TaskId, Task> tasks;
    tasks[0] = make_task(0, {5, 0}, {6, 0});
    std::vector<RobotProgress> fleet{make_progress(0, {0, 0}, {0})};
    TriggerDecision decision;
    decision.fired = true;
    decision.fault = true;
    decision.affected_robots = {0};
    std::map<RobotId, std::vector<TaskId>> completed{{0, {}}};
    CHECK_THROWS_WITH_AS(warm_start_reschedule(fleet, completed, decision, tasks,
                                               BidMetric::energy_closed_form, context()),
                         doctest::Contains("no active robot"), std::runtime_error);
}

TEST_CASE("truncated pre-event schedule stays partition-valid as a fallback") {
    // the warm start initializes from the retained chains; dropping the
    // affected robot's tasks back into the pool must never lose a task
    std::map<TaskId, Task> tasks;
    for (int i = 0; i < 6; ++i)
        tasks[i] = make_task(i, {1.0 + i, 0}, {2.0 + i, 0});
    std::vector<RobotProgress> fleet{make_progress(0, {0, 0}, {0, 1, 2}),
                                     make_progress(1, {8, 0}, {3, 4}),
                                     make_progress(2, {16, 0}, {5})};
    TriggerDecision decision;
    decision.fired = true;
    decision.deviation = true;
    decision.affected_robots = {1};
    std::map<RobotId, std::vector<TaskId>> completed{{0, {}}, {1, {}}, {2, {}}};
    ReschedulePlan plan = warm_start_reschedule(fleet, completed, decision, tasks,
                                                BidMetric::energy_closed_form, context());
    CHECK(validate_partition(plan.full_view, {0, 1, 2, 3, 4, 5}));
    // unaffected robots keep their prefixes
    CHECK(plan.new_remaining[0].size() >= 3);
    CHECK(plan.new_remaining[2].size() >= 1);
}

TEST_CASE("cold start reauctions every unstarted task") {
    std::map<TaskId, Task> tasks;
    for (int i = 0; i < 4; ++i) tasks[i] = make_task(i, {1.0 + i, 0}, {2.0 + i, 0});
    std::vector<RobotProgress> fleet{make_progress(0, {0, 0}, {0, 1}),
                                     make_progress(1, {10, 0}, {2, 3})};
    TriggerDecision decision;
    decision.fired = true;
    decision.deviation = true;
    decision.affected_robots = {0};
    std::map<RobotId, std::vector<TaskId>> completed{{0, {}}, {1, {}}};
    ReschedulePlan plan =
        warm_start_reschedule(fleet, completed, decision, tasks,
                              BidMetric::energy_closed_form, context(), true);
    CHECK(plan.reassigned.size() == 4);
    CHECK(validate_partition(plan.full_view, {0, 1, 2, 3}));
}

TEST_CASE("cost-to-go bookkeeping") {
    std::map<TaskId, Task> tasks;
    tasks[0] = make_task(0, {3, 0}, {7, 0}, 10.0);

    SUBCASE("all tasks complete means zero") {
        std::vector<RobotProgress> fleet{make_progress(0, {0, 0}, {})};
        CostToGo v = track_cost_to_go(fleet, tasks, kField, 1.0, false, 0);
        CHECK(v.value == 0.0);
        CHECK(v.unstarted_count == 0);
    }
    SUBCASE("one pending task is its route energy plus rho") {
        std::vector<RobotProgress> fleet{make_progress(0, {0, 0}, {0})};
        CostToGo v = track_cost_to_go(fleet, tasks, kField, 2.5, false, 1);
        double expected =
            route_energy_closed_form({0, 0}, {tasks[0]}, RobotParams{}, kField, false) + 2.5;
        CHECK(v.value == doctest::Approx(expected).epsilon(1e-12));
        CHECK(v.unstarted_count == 1);
    }
    SUBCASE("faulted robots contribute nothing") {
        std::vector<RobotProgress> fleet{make_progress(0, {0, 0}, {0})};
        fleet[0].active = false;
        CostToGo v = track_cost_to_go(fleet, tasks, kField, 1.0, false, 0);
        CHECK(v.value == 0.0);
    }
}
