#include "fleet/schedule.hpp"

namespace fleet {

bool validate_partition(const Schedule& schedule, const std::set<TaskId>& tasks) {
    std::map<TaskId, int> seen;
    for (const auto& [robot, seq] : schedule.sequences) {
        for (TaskId t : seq) {
            if (!tasks.count(t)) return false;
            if (++seen[t] > 1) return false;
        }
    }
    return seen.size() == tasks.size();
}

std::vector<Waypoint> waypoint_list(const Vec2& robot_depot,
                                    const std::vector<Task>& sequence,
                                    bool return_to_depot) {
    std::vector<Waypoint> out;
    out.reserve(2 * sequence.size() + 2);
    out.push_back({robot_depot, PhaseKind::unloaded, -1});
    for (const auto& task : sequence) {
        out.push_back({task.pickup, PhaseKind::unloaded, task.id});
        out.push_back({task.dropoff, PhaseKind::loaded, task.id});
    }
    // an empty route is just the depot; no return leg to itself
    if (return_to_depot && !sequence.empty())
        out.push_back({robot_depot, PhaseKind::unloaded, -1});
    return out;
}

}  // namespace fleet
