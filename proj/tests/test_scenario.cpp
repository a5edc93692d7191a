#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "fleet/scenario.hpp"

using namespace fleet;

namespace {
Workspace default_ws() { return Workspace{}; }
}  // namespace

TEST_CASE("grid layout is a centered lattice inside the margin") {
    auto stations = generate_layout(LayoutKind::grid, default_ws(), 4, 1);
    REQUIRE(stations.size() == 4);
    // 2x2 lattice on the inset box corners
    std::set<std::pair<double, double>> pts;
    for (const auto& s : stations) pts.insert({s.x, s.y});
    CHECK(pts.count({1.0, 1.0}));
    CHECK(pts.count({19.0, 1.0}));
    CHECK(pts.count({1.0, 19.0}));
    CHECK(pts.count({19.0, 19.0}));
}

TEST_CASE("layouts are deterministic under the seed") {
    for (LayoutKind kind :
         {LayoutKind::grid, LayoutKind::random_uniform, LayoutKind::clustered}) {
        auto a = generate_layout(kind, default_ws(), 20, 77);
        auto b = generate_layout(kind, default_ws(), 20, 77);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].x == b[i].x);
            CHECK(a[i].y == b[i].y);
        }
        auto c = generate_layout(kind, default_ws(), 20, 78);
        if (kind != LayoutKind::grid) {
            bool differs = false;
            for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].x != c[i].x;
            CHECK(differs);
        }
    }
}

TEST_CASE("clustered stations stay inside the workspace") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto stations = generate_layout(LayoutKind::clustered, default_ws(), 30, seed);
        for (const auto& s : stations) {
            CHECK(s.x >= 1.0);
            CHECK(s.x <= 19.0);
            CHECK(s.y >= 1.0);
            CHECK(s.y <= 19.0);
        }
    }
}

TEST_CASE("task generation contracts") {
    auto stations = generate_layout(LayoutKind::random_uniform, default_ws(), 12, 3);
    CHECK(generate_tasks(stations, 0, 0, 20, 3).empty());
    auto tasks = generate_tasks(stations, 40, 5, 5, 3);
    REQUIRE(tasks.size() == 40);
    std::set<TaskId> seen;
    for (const auto& t : tasks) {
        CHECK(t.payload == doctest::Approx(5.0));  // degenerate range
        CHECK(distance(t.pickup, t.dropoff) > 0.0);
        CHECK(seen.insert(t.id).second);
    }
}

TEST_CASE("friction field generation") {
    Workspace ws = default_ws();
    FrictionField uniform = generate_friction_field(ws, 0.02, 0.02, 4, 5);
    CHECK(uniform.kind == FrictionKind::uniform);
    CHECK(uniform.uniform_mu == doctest::Approx(0.02));

    FrictionField zoned = generate_friction_field(ws, 0.005, 0.08, 4, 5);
    CHECK(zoned.kind == FrictionKind::zoned);
    REQUIRE(zoned.zones.size() == 16);
    for (const auto& z : zoned.zones) {
        CHECK(z.mu >= 0.005);
        CHECK(z.mu <= 0.08);
    }
    FrictionField zoned2 = generate_friction_field(ws, 0.005, 0.08, 4, 5);
    for (std::size_t i = 0; i < zoned.zones.size(); ++i)
        CHECK(zoned.zones[i].mu == zoned2.zones[i].mu);
    CHECK_THROWS_AS(generate_friction_field(ws, 0.0, 0.08, 4, 5), std::invalid_argument);
}

TEST_CASE("proportional case gives exactly r = 1") {
    auto stations = generate_layout(LayoutKind::random_uniform, default_ws(), 10, 9);
    auto tasks = generate_tasks(stations, 30, 0, 0, 9);  // zero payloads
    FrictionField field = FrictionField::uniform(0.02);
    CorrelationResult r = energy_distance_correlation(stations, tasks, RobotParams{}, field,
                                                      default_ws(), 400, 9);
    REQUIRE(r.ok);
    CHECK(std::fabs(r.r - 1.0) < 1e-12);
}

TEST_CASE("mixed payloads keep r high on uniform friction") {
    auto stations = generate_layout(LayoutKind::random_uniform, default_ws(), 10, 10);
    auto tasks = generate_tasks(stations, 30, 0, 20, 10);
    FrictionField field = FrictionField::uniform(0.02);
    CorrelationResult r = energy_distance_correlation(stations, tasks, RobotParams{}, field,
                                                      default_ws(), 400, 10);
    REQUIRE(r.ok);
    CHECK(r.r > 0.9);
    CHECK(r.r <= 1.0);
}

TEST_CASE("wide zoned friction depresses the correlation") {
    auto stations = generate_layout(LayoutKind::random_uniform, default_ws(), 10, 11);
    auto tasks = generate_tasks(stations, 30, 0, 20, 11);
    FrictionField uniform = FrictionField::uniform(0.02);
    FrictionField zoned = generate_friction_field(default_ws(), 0.005, 0.08, 4, 11);
    double r_uniform = energy_distance_correlation(stations, tasks, RobotParams{}, uniform,
                                                   default_ws(), 400, 11)
                           .r;
    double r_zoned = energy_distance_correlation(stations, tasks, RobotParams{}, zoned,
                                                 default_ws(), 400, 11)
                         .r;
    CHECK(r_zoned < r_uniform - 0.05);
    CHECK(r_zoned >= -1.0);
    CHECK(r_zoned <= 1.0);
}

TEST_CASE("scenario generation is deterministic and validates") {
    ScenarioConfig config;
    config.robot_count = 5;
    config.task_count = 25;
    config.layout = LayoutKind::clustered;
    config.mu_lo = 0.01;
    config.mu_hi = 0.04;
    config.fault_rate = 0.02;
    config.priority_rate = 0.02;
    Scenario a = generate_scenario(config, 123);
    Scenario b = generate_scenario(config, 123);
    CHECK(scenario_to_json(a) == scenario_to_json(b));
    CHECK_NOTHROW(a.validate());
    // depots land on distinct stations
    std::set<std::pair<double, double>> depots;
    for (const auto& r : a.robots) depots.insert({r.depot.x, r.depot.y});
    CHECK(depots.size() == a.robots.size());
}

TEST_CASE("scenario file round-trips losslessly") {
    ScenarioConfig config;
    config.robot_count = 3;
    config.task_count = 10;
    config.mu_lo = 0.005;
    config.mu_hi = 0.08;
    config.fault_rate = 0.05;
    config.priority_rate = 0.05;
    Scenario sc = generate_scenario(config, 42);
    std::string json = scenario_to_json(sc);
    Scenario back = scenario_from_json(json);
    CHECK(scenario_to_json(back) == json);
    CHECK(back.robots.size() == sc.robots.size());
    CHECK(back.tasks.size() == sc.tasks.size());
    CHECK(back.disruptions.size() == sc.disruptions.size());
    CHECK(back.seed == sc.seed);
}

TEST_CASE("malformed scenarios are rejected") {
    ScenarioConfig config;
    Scenario sc = generate_scenario(config, 1);
    sc.tasks.push_back(sc.tasks.front());  // duplicate id
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);

    Scenario sc2 = generate_scenario(config, 1);
    sc2.tasks.front().pickup = {100.0, 0.0};
    CHECK_THROWS_AS(sc2.validate(), std::invalid_argument);

    CHECK_THROWS_AS(scenario_from_json("{\"schema_version\": 2}"), std::exception);
}
