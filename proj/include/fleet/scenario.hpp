#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fleet/friction.hpp"
#include "fleet/rescheduler.hpp"
#include "fleet/types.hpp"

namespace fleet {

/// Complete experiment input: workspace, friction field, fleet, tasks,
/// disruption stream and the seed everything was generated from.
struct Scenario {
    int schema_version = 1;
    Workspace workspace;
    FrictionField friction;
    std::vector<RobotSpec> robots;
    std::vector<Task> tasks;
    std::vector<DisruptionEvent> disruptions;
    std::uint64_t seed = 0;
    bool return_to_depot = true;

    void validate() const;
};

/// Station layout generators. All are pure functions of (spec, seed);
/// stations keep a 1 m inset from the workspace border so turning arcs stay
/// inside the box.
std::vector<Vec2> generate_layout(LayoutKind kind, const Workspace& workspace,
                                  int station_count, std::uint64_t seed);

/// Tasks with pickup/dropoff drawn as distinct stations, payload uniform in
/// the given range.
std::vector<Task> generate_tasks(const std::vector<Vec2>& stations, int count,
                                 double payload_lo, double payload_hi, std::uint64_t seed);

/// k x k rectangular zones tiling the workspace, each mu uniform in
/// [mu_lo, mu_hi]. Equal bounds produce a uniform field.
FrictionField generate_friction_field(const Workspace& workspace, double mu_lo, double mu_hi,
                                      int zone_grid, std::uint64_t seed);

struct ScenarioConfig {
    Workspace workspace;
    LayoutKind layout = LayoutKind::grid;
    int station_count = 16;
    int robot_count = 4;
    int task_count = 20;
    double payload_lo = 0.0;
    double payload_hi = 20.0;
    double mu_lo = 0.02;
    double mu_hi = 0.02;
    int zone_grid = 4;
    bool return_to_depot = true;
    // disruption stream rates (events per second of nominal horizon); zero = none
    double fault_rate = 0.0;
    double priority_rate = 0.0;
    double disruption_horizon = 120.0;
    RobotParams robot_params;
    BatteryParams battery;
};

/// Full scenario from a config and a seed: layout, depots (distinct stations),
/// tasks, friction field and optional Poisson-like disruption streams.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

/// Pearson correlation between the closed-form bid energy (zone-aware on
/// zoned fields) and the summed leg distance over sampled (position, task)
/// pairs. Returns r in [-1, 1]; degenerate (zero-variance) inputs report 0
/// with ok=false.
struct CorrelationResult {
    double r = 0.0;
    bool ok = false;
};
CorrelationResult energy_distance_correlation(const std::vector<Vec2>& stations,
                                              const std::vector<Task>& tasks,
                                              const RobotParams& params,
                                              const FrictionField& field,
                                              const Workspace& workspace, int sample_count,
                                              std::uint64_t seed);

// Scenario file round-trip (JSON, schema_version 1).
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace fleet
