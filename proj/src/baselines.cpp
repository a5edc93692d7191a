#include "fleet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "fleet/physics.hpp"

namespace fleet {

namespace {

Schedule empty_schedule(const std::vector<Bidder>& robots) {
    Schedule s;
    for (const auto& r : robots) {
        s.sequences[r.id] = {};
        s.predicted_energy[r.id] = 0.0;
        s.cursor[r.id] = 0;
    }
    return s;
}

// nearest pending pickup for one robot; ties by task id
std::size_t nearest_pickup(const Vec2& from, const std::vector<Task>& pool) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        double d = distance(from, pool[i].pickup);
        if (d < best_d || (d == best_d && pool[i].id < pool[best].id)) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

}  // namespace

Schedule nearest_task_allocate(const std::vector<Bidder>& robots,
                               const std::vector<Task>& tasks, NearestTaskMode mode) {
    if (robots.empty() && !tasks.empty())
        throw std::invalid_argument("nearest_task_allocate needs at least one robot");
    Schedule schedule = empty_schedule(robots);
    std::vector<Task> pool = tasks;
    std::vector<Vec2> at;
    for (const auto& r : robots) at.push_back(r.position);

    if (mode == NearestTaskMode::robot_centric) {
        // each robot in id order grabs its own nearest pending pickup
        while (!pool.empty()) {
            for (std::size_t r = 0; r < robots.size() && !pool.empty(); ++r) {
                std::size_t pick = nearest_pickup(at[r], pool);
                schedule.sequences[robots[r].id].push_back(pool[pick].id);
                at[r] = pool[pick].dropoff;
                pool.erase(pool.begin() + pick);
            }
        }
    } else {
        // one award per step: the globally closest (robot end, pickup) pair
        while (!pool.empty()) {
            std::size_t best_r = 0, best_t = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < robots.size(); ++r)
                for (std::size_t t = 0; t < pool.size(); ++t) {
                    double d = distance(at[r], pool[t].pickup);
                    if (d < best_d ||
                        (d == best_d && std::tie(robots[r].id, pool[t].id) <
                                            std::tie(robots[best_r].id, pool[best_t].id))) {
                        best_d = d;
                        best_r = r;
                        best_t = t;
                    }
                }
            schedule.sequences[robots[best_r].id].push_back(pool[best_t].id);
            at[best_r] = pool[best_t].dropoff;
            pool.erase(pool.begin() + best_t);
        }
    }
    return schedule;
}

Schedule nearest_robot_allocate(const std::vector<Bidder>& robots,
                                const std::vector<Task>& tasks) {
    if (robots.empty() && !tasks.empty())
        throw std::invalid_argument("nearest_robot_allocate needs at least one robot");
    Schedule schedule = empty_schedule(robots);
    std::vector<Task> ordered = tasks;
    std::sort(ordered.begin(), ordered.end(),
              [](const Task& a, const Task& b) { return a.id < b.id; });
    std::vector<Vec2> at;
    for (const auto& r : robots) at.push_back(r.position);

    for (const auto& task : ordered) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < robots.size(); ++r) {
            double d = distance(at[r], task.pickup);
            if (d < best_d || (d == best_d && robots[r].id < robots[best].id)) {
                best_d = d;
                best = r;
            }
        }
        schedule.sequences[robots[best].id].push_back(task.id);
        at[best] = task.dropoff;
    }
    return schedule;
}

double const_velocity_energy(const Schedule& schedule, const std::vector<Bidder>& robots,
                             const std::vector<Vec2>& depots, const std::vector<Task>& tasks,
                             const FrictionField& field, double cruise_speed,
                             bool return_to_depot, double dt) {
    std::map<TaskId, const Task*> by_id;
    for (const auto& t : tasks) by_id[t.id] = &t;

    double total = 0.0;
    for (std::size_t r = 0; r < robots.size(); ++r) {
        auto it = schedule.sequences.find(robots[r].id);
        if (it == schedule.sequences.end()) continue;
        std::vector<Task> seq;
        for (TaskId tid : it->second) seq.push_back(*by_id.at(tid));
        std::vector<Waypoint> wps = waypoint_list(depots[r], seq, return_to_depot);

        for (std::size_t i = 0; i + 1 < wps.size(); ++i) {
            Vec2 a = wps[i].point, b = wps[i + 1].point;
            double len = distance(a, b);
            if (len <= 0.0) continue;
            double payload =
                wps[i + 1].arrival_phase == PhaseKind::loaded ? by_id.at(wps[i + 1].task)->payload : 0.0;
            double m_eff = robots[r].params.effective_mass(payload);
            // straight leg at constant speed: demand power is friction only
            int steps = std::max(1, static_cast<int>(std::ceil(len / (cruise_speed * dt))));
            double ds = len / steps;
            for (int k = 0; k < steps; ++k) {
                Vec2 p = a + (b - a) * ((k + 0.5) / steps);
                double p_demand = field.mu_at(p) * m_eff * kGravity * cruise_speed;
                total += power_split(p_demand, robots[r].params.efficiency).p_battery *
                         (ds / cruise_speed);
            }
        }
    }
    return total;
}

namespace {

double assignment_cost(const std::vector<Bidder>& robots, const std::vector<Task>& tasks,
                       const std::vector<int>& assign, const RouteCostOracle& oracle) {
    double total = 0.0;
    for (std::size_t r = 0; r < robots.size(); ++r) {
        std::vector<Task> seq;
        for (std::size_t t = 0; t < tasks.size(); ++t)
            if (assign[t] == static_cast<int>(r)) seq.push_back(tasks[t]);
        // fixed ordering: ascending task id
        std::sort(seq.begin(), seq.end(),
                  [](const Task& a, const Task& b) { return a.id < b.id; });
        total += oracle(robots[r], seq);
    }
    return total;
}

std::vector<int> decode_assignment(std::uint64_t code, std::size_t m, std::size_t n) {
    std::vector<int> assign(m);
    for (std::size_t t = 0; t < m; ++t) {
        assign[t] = static_cast<int>(code % n);
        code /= n;
    }
    return assign;
}

Schedule assignment_to_schedule(const std::vector<Bidder>& robots,
                                const std::vector<Task>& tasks,
                                const std::vector<int>& assign) {
    Schedule s;
    for (const auto& r : robots) {
        s.sequences[r.id] = {};
        s.predicted_energy[r.id] = 0.0;
        s.cursor[r.id] = 0;
    }
    std::vector<std::vector<TaskId>> per_robot(robots.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) per_robot[assign[t]].push_back(tasks[t].id);
    for (std::size_t r = 0; r < robots.size(); ++r) {
        std::sort(per_robot[r].begin(), per_robot[r].end());
        s.sequences[robots[r].id] = per_robot[r];
    }
    return s;
}

void check_guard(std::size_t n, std::size_t m, const EnumerationGuard& guard) {
    if (n == 0) throw std::invalid_argument("enumeration needs at least one robot");
    if (static_cast<int>(n) > guard.max_robots || static_cast<int>(m) > guard.max_tasks)
        throw std::invalid_argument("enumeration refused: instance above size guard");
}

}  // namespace

std::pair<Schedule, double> enumerate_optimal_serial(const std::vector<Bidder>& robots,
                                                     const std::vector<Task>& tasks,
                                                     const RouteCostOracle& oracle,
                                                     const EnumerationGuard& guard) {
    std::size_t n = robots.size(), m = tasks.size();
    check_guard(n, m, guard);

    std::uint64_t total = 1;
    for (std::size_t t = 0; t < m; ++t) total *= n;

    double best_cost = std::numeric_limits<double>::infinity();
    std::uint64_t best_code = 0;
    for (std::uint64_t code = 0; code < total; ++code) {
        double c = assignment_cost(robots, tasks, decode_assignment(code, m, n), oracle);
        if (c < best_cost) {
            best_cost = c;
            best_code = code;
        }
    }
    return {assignment_to_schedule(robots, tasks, decode_assignment(best_code, m, n)),
            best_cost};
}

std::pair<Schedule, double> enumerate_optimal(const std::vector<Bidder>& robots,
                                              const std::vector<Task>& tasks,
                                              const RouteCostOracle& oracle,
                                              const EnumerationGuard& guard) {
    std::size_t n = robots.size(), m = tasks.size();
    check_guard(n, m, guard);

    std::uint64_t total = 1;
    for (std::size_t t = 0; t < m; ++t) total *= n;

    // parallel scan over assignment codes; ties resolve to the smallest code,
    // which is the lexicographically smallest assignment vector
    double best_cost = std::numeric_limits<double>::infinity();
    std::uint64_t best_code = 0;
#pragma omp parallel
    {
        double local_cost = std::numeric_limits<double>::infinity();
        std::uint64_t local_code = 0;
#pragma omp for schedule(static)
        for (long long code = 0; code < static_cast<long long>(total); ++code) {
            double c = assignment_cost(robots, tasks,
                                       decode_assignment(static_cast<std::uint64_t>(code), m, n),
                                       oracle);
            if (c < local_cost ||
                (c == local_cost && static_cast<std::uint64_t>(code) < local_code)) {
                local_cost = c;
                local_code = static_cast<std::uint64_t>(code);
            }
        }
#pragma omp critical
        {
            if (local_cost < best_cost || (local_cost == best_cost && local_code < best_code)) {
                best_cost = local_cost;
                best_code = local_code;
            }
        }
    }
    return {assignment_to_schedule(robots, tasks, decode_assignment(best_code, m, n)),
            best_cost};
}

double schedule_cost_fixed_order(const Schedule& schedule, const std::vector<Bidder>& robots,
                                 const std::vector<Task>& tasks,
                                 const RouteCostOracle& oracle) {
    std::map<TaskId, const Task*> by_id;
    for (const auto& t : tasks) by_id[t.id] = &t;
    double total = 0.0;
    for (const auto& r : robots) {
        auto it = schedule.sequences.find(r.id);
        if (it == schedule.sequences.end()) continue;
        std::vector<Task> seq;
        for (TaskId tid : it->second) seq.push_back(*by_id.at(tid));
        std::sort(seq.begin(), seq.end(),
                  [](const Task& a, const Task& b) { return a.id < b.id; });
        total += oracle(r, seq);
    }
    return total;
}

}  // namespace fleet
