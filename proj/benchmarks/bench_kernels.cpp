// Compares the OpenMP kernels against their serial reference implementations
// and checks that both produce identical results.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fleet/auction.hpp"
#include "fleet/baselines.hpp"
#include "fleet/collision.hpp"
#include "fleet/energy.hpp"
#include "fleet/pipeline.hpp"
#include "fleet/rng.hpp"
#include "fleet/scenario.hpp"

using namespace fleet;

namespace {

double best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        if (ms < best) best = ms;
    }
    return best;
}

void report(const std::string& name, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-28s %10.2f ms %10.2f ms %8.2fx   %s\n", name.c_str(), serial_ms,
                parallel_ms, serial_ms / parallel_ms, equal ? "results equal" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serial\n");
#endif
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    Rng rng(1);

    // ---- auction round, zone-aware bids over a big pool
    {
        ScenarioConfig config;
        config.robot_count = 20;
        config.task_count = 400;
        config.mu_lo = 0.005;
        config.mu_hi = 0.08;
        config.zone_grid = 8;
        Scenario sc = generate_scenario(config, 3);
        std::vector<Bidder> robots = scenario_bidders(sc);
        std::vector<Vec2> positions;
        for (const auto& r : robots) positions.push_back(r.position);
        BidContext ctx;
        ctx.field = &sc.friction;

        std::vector<BidRecord> a, b;
        double serial_ms = best_of(5, [&] {
            a = evaluate_round_serial(robots, sc.tasks, positions,
                                      BidMetric::zone_aware_energy, ctx);
        });
        double parallel_ms = best_of(5, [&] {
            b = evaluate_round(robots, sc.tasks, positions, BidMetric::zone_aware_energy,
                               ctx);
        });
        bool equal = a.size() == b.size();
        for (std::size_t i = 0; equal && i < a.size(); ++i)
            equal = a[i].value == b[i].value && a[i].robot == b[i].robot;
        report("auction round (zoned bids)", serial_ms, parallel_ms, equal);
    }

    // ---- pairwise conflict detection over a crowded floor
    {
        ScenarioConfig config;
        config.robot_count = 12;
        config.task_count = 36;
        Scenario sc = generate_scenario(config, 5);
        PipelineOptions options;
        options.refine_collisions = false;
        BidContext ctx = options.bid_context(sc);
        auto [schedule, trace] = run_auction(scenario_bidders(sc), sc.tasks, options.metric,
                                             ctx);
        std::map<TaskId, Task> by_id;
        for (const auto& t : sc.tasks) by_id[t.id] = t;
        std::vector<RouteTrajectory> routes;
        TrajectoryOptions topt;
        for (const auto& [rid, seq] : schedule.sequences) {
            std::vector<Task> tasks;
            for (TaskId tid : seq) tasks.push_back(by_id[tid]);
            RouteTrajectory r =
                optimize_route(sc.robots[rid].depot, tasks, sc.robots[rid].params,
                               sc.robots[rid].battery, sc.friction, sc.workspace,
                               options.weights, topt);
            r.robot = rid;
            routes.push_back(std::move(r));
        }

        std::vector<ConflictWindow> a, b;
        double serial_ms = best_of(5, [&] { a = detect_conflicts_serial(routes, 1.0); });
        double parallel_ms = best_of(5, [&] { b = detect_conflicts(routes, 1.0); });
        bool equal = a.size() == b.size();
        for (std::size_t i = 0; equal && i < a.size(); ++i)
            equal = a[i].t_start == b[i].t_start && a[i].min_separation == b[i].min_separation;
        report("conflict detection (12 bots)", serial_ms, parallel_ms, equal);
    }

    // ---- exhaustive assignment enumeration
    {
        std::vector<Bidder> robots;
        for (int r = 0; r < 3; ++r)
            robots.push_back({r, {rng.uniform(0, 20), rng.uniform(0, 20)}, RobotParams{}});
        std::vector<Task> tasks;
        for (int t = 0; t < 8; ++t) {
            Task task;
            task.id = t;
            task.pickup = {rng.uniform(0, 20), rng.uniform(0, 20)};
            task.dropoff = {rng.uniform(0, 20), rng.uniform(0, 20)};
            task.payload = rng.uniform(0, 20);
            tasks.push_back(task);
        }
        FrictionField field = generate_friction_field(Workspace{}, 0.005, 0.08, 4, 9);
        RouteCostOracle oracle = [&](const Bidder& robot, const std::vector<Task>& seq) {
            return route_energy_closed_form(robot.position, seq, robot.params, field, false);
        };

        std::pair<Schedule, double> a, b;
        double serial_ms = best_of(3, [&] { a = enumerate_optimal_serial(robots, tasks, oracle); });
        double parallel_ms = best_of(3, [&] { b = enumerate_optimal(robots, tasks, oracle); });
        bool equal = a.second == b.second && a.first.sequences == b.first.sequences;
        report("enumeration (3^8 routes)", serial_ms, parallel_ms, equal);
    }

    return 0;
}
