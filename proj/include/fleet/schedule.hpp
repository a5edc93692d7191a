#pragma once

#include <map>
#include <set>
#include <vector>

#include "fleet/types.hpp"

namespace fleet {

enum class PhaseKind { unloaded, loaded };

struct Waypoint {
    Vec2 point;
    PhaseKind arrival_phase = PhaseKind::unloaded;  // phase of the leg ending here
    TaskId task = -1;                               // task served by that leg, -1 for depot legs
};

/// Fleet schedule: one ordered task sequence per robot plus the per-robot
/// predicted route energy and the cursor of the next unstarted task.
struct Schedule {
    std::map<RobotId, std::vector<TaskId>> sequences;
    std::map<RobotId, double> predicted_energy;
    std::map<RobotId, std::size_t> cursor;

    std::size_t task_count() const {
        std::size_t n = 0;
        for (const auto& [id, seq] : sequences) n += seq.size();
        return n;
    }
};

/// True iff every task id appears in exactly one sequence exactly once.
bool validate_partition(const Schedule& schedule, const std::set<TaskId>& tasks);

/// Expands a task sequence into the multiphase waypoint chain
/// depot -> p1 -> d1 -> ... -> pk -> dk (-> depot). The leg into a pickup is
/// unloaded, the pickup-to-dropoff leg is loaded. First entry is the depot
/// itself (zero-length arrival, unloaded).
std::vector<Waypoint> waypoint_list(const Vec2& robot_depot,
                                    const std::vector<Task>& sequence,
                                    bool return_to_depot);

}  // namespace fleet
