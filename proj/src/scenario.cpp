#include "fleet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fleet/energy.hpp"
#include "fleet/rng.hpp"

namespace fleet {

namespace {
constexpr double kStationMargin = 1.0;  // m, keeps turning arcs inside the box
}

void Scenario::validate() const {
    if (schema_version != 1) throw std::invalid_argument("unsupported schema_version");
    workspace.validate();
    friction.validate();
    std::set<TaskId> ids;
    for (const auto& r : robots) {
        r.params.validate();
        r.battery.validate();
        if (!workspace.contains(r.depot))
            throw std::invalid_argument("robot depot outside workspace");
    }
    double w_max = robots.empty() ? 1e9 : robots.front().params.w_max;
    for (const auto& t : tasks) {
        t.validate(w_max);
        if (!ids.insert(t.id).second)
            throw std::invalid_argument("duplicate task id " + std::to_string(t.id));
        if (!workspace.contains(t.pickup) || !workspace.contains(t.dropoff))
            throw std::invalid_argument("task endpoint outside workspace");
    }
}

std::vector<Vec2> generate_layout(LayoutKind kind, const Workspace& workspace,
                                  int station_count, std::uint64_t seed) {
    if (station_count < 2) throw std::invalid_argument("need at least 2 stations");
    Rng rng(derive_seed(seed, 0x5741));
    std::vector<Vec2> stations;
    stations.reserve(station_count);

    double x0 = kStationMargin, x1 = workspace.width - kStationMargin;
    double y0 = kStationMargin, y1 = workspace.height - kStationMargin;

    switch (kind) {
        case LayoutKind::grid: {
            int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(station_count))));
            int rows = static_cast<int>(std::ceil(static_cast<double>(station_count) / cols));
            for (int r = 0; r < rows && static_cast<int>(stations.size()) < station_count; ++r)
                for (int c = 0; c < cols && static_cast<int>(stations.size()) < station_count;
                     ++c) {
                    double fx = cols > 1 ? static_cast<double>(c) / (cols - 1) : 0.5;
                    double fy = rows > 1 ? static_cast<double>(r) / (rows - 1) : 0.5;
                    stations.push_back({x0 + fx * (x1 - x0), y0 + fy * (y1 - y0)});
                }
            break;
        }
        case LayoutKind::random_uniform: {
            for (int i = 0; i < station_count; ++i)
                stations.push_back({rng.uniform(x0, x1), rng.uniform(y0, y1)});
            break;
        }
        case LayoutKind::clustered: {
            int cells = 3 + static_cast<int>(rng.uniform_index(3));  // 3..5 cells
            std::vector<Vec2> centers;
            for (int c = 0; c < cells; ++c)
                centers.push_back({rng.uniform(x0, x1), rng.uniform(y0, y1)});
            double spread = std::min(workspace.width, workspace.height) / 10.0;
            for (int i = 0; i < station_count; ++i) {
                const Vec2& c = centers[i % cells];
                Vec2 p;
                do {  // rejection-resample until inside the inset box
                    p = {rng.normal(c.x, spread), rng.normal(c.y, spread)};
                } while (p.x < x0 || p.x > x1 || p.y < y0 || p.y > y1);
                stations.push_back(p);
            }
            break;
        }
    }
    return stations;
}

std::vector<Task> generate_tasks(const std::vector<Vec2>& stations, int count,
                                 double payload_lo, double payload_hi, std::uint64_t seed) {
    if (stations.size() < 2) throw std::invalid_argument("need at least 2 stations");
    Rng rng(derive_seed(seed, 0x5441));
    std::vector<Task> tasks;
    tasks.reserve(count);
    for (int i = 0; i < count; ++i) {
        std::size_t a = rng.uniform_index(stations.size());
        std::size_t b = rng.uniform_index(stations.size());
        while (b == a) b = rng.uniform_index(stations.size());
        Task t;
        t.id = i;
        t.pickup = stations[a];
        t.dropoff = stations[b];
        t.payload = rng.uniform(payload_lo, payload_hi);
        tasks.push_back(t);
    }
    return tasks;
}

FrictionField generate_friction_field(const Workspace& workspace, double mu_lo, double mu_hi,
                                      int zone_grid, std::uint64_t seed) {
    if (mu_lo <= 0.0 || mu_hi < mu_lo)
        throw std::invalid_argument("need 0 < mu_lo <= mu_hi");
    if (mu_lo == mu_hi) return FrictionField::uniform(mu_lo);

    Rng rng(derive_seed(seed, 0x4652));
    FrictionField f;
    f.kind = FrictionKind::zoned;
    f.default_mu = 0.5 * (mu_lo + mu_hi);
    double zw = workspace.width / zone_grid;
    double zh = workspace.height / zone_grid;
    for (int r = 0; r < zone_grid; ++r)
        for (int c = 0; c < zone_grid; ++c)
            f.zones.push_back({Rect{c * zw, r * zh, zw, zh}, rng.uniform(mu_lo, mu_hi)});
    return f;
}

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    Scenario sc;
    sc.workspace = config.workspace;
    sc.workspace.layout_kind = config.layout;
    sc.seed = seed;
    sc.return_to_depot = config.return_to_depot;

    std::vector<Vec2> stations =
        generate_layout(config.layout, sc.workspace, config.station_count, seed);
    sc.tasks = generate_tasks(stations, config.task_count, config.payload_lo,
                              std::min(config.payload_hi, config.robot_params.w_max), seed);
    sc.friction = generate_friction_field(sc.workspace, config.mu_lo, config.mu_hi,
                                          config.zone_grid, seed);

    // depots on distinct stations
    Rng rng(derive_seed(seed, 0x4450));
    std::vector<std::size_t> order(stations.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_index(i)]);
    for (int r = 0; r < config.robot_count; ++r) {
        RobotSpec spec;
        spec.params = config.robot_params;
        spec.battery = config.battery;
        spec.depot = stations[order[r % order.size()]];
        sc.robots.push_back(spec);
    }

    // seeded disruption streams
    if (config.fault_rate > 0.0 || config.priority_rate > 0.0) {
        Rng drng(derive_seed(seed, 0x4453));
        double t = 0.0;
        while (config.fault_rate > 0.0) {
            t += drng.exponential(config.fault_rate);
            if (t >= config.disruption_horizon) break;
            DisruptionEvent ev;
            ev.kind = DisruptionKind::fault;
            ev.t = t;
            ev.robot = static_cast<RobotId>(drng.uniform_index(config.robot_count));
            sc.disruptions.push_back(ev);
        }
        t = 0.0;
        int next_id = config.task_count;
        while (config.priority_rate > 0.0) {
            t += drng.exponential(config.priority_rate);
            if (t >= config.disruption_horizon) break;
            DisruptionEvent ev;
            ev.kind = DisruptionKind::priority_task;
            ev.t = t;
            std::size_t a = drng.uniform_index(stations.size());
            std::size_t b = drng.uniform_index(stations.size());
            while (b == a) b = drng.uniform_index(stations.size());
            Task task;
            task.id = next_id++;
            task.pickup = stations[a];
            task.dropoff = stations[b];
            task.payload = drng.uniform(config.payload_lo,
                                        std::min(config.payload_hi, config.robot_params.w_max));
            task.priority = true;
            task.arrival_time = t;
            ev.task = task;
            sc.disruptions.push_back(ev);
        }
        std::sort(sc.disruptions.begin(), sc.disruptions.end(),
                  [](const DisruptionEvent& a, const DisruptionEvent& b) { return a.t < b.t; });
    }

    sc.validate();
    return sc;
}

CorrelationResult energy_distance_correlation(const std::vector<Vec2>& stations,
                                              const std::vector<Task>& tasks,
                                              const RobotParams& params,
                                              const FrictionField& field,
                                              const Workspace& workspace, int sample_count,
                                              std::uint64_t seed) {
    if (sample_count < 2) throw std::invalid_argument("need sample_count >= 2");
    (void)stations;
    Rng rng(derive_seed(seed, 0x434f));
    std::vector<double> energy, dist;
    energy.reserve(sample_count);
    dist.reserve(sample_count);
    for (int i = 0; i < sample_count; ++i) {
        Vec2 q{rng.uniform(kStationMargin, workspace.width - kStationMargin),
               rng.uniform(kStationMargin, workspace.height - kStationMargin)};
        const Task& t = tasks[rng.uniform_index(tasks.size())];
        double e = field.kind == FrictionKind::zoned
                       ? bid_energy_zoned(q, t, params, field)
                       : bid_energy_approx(q, t, params, field.uniform_mu);
        energy.push_back(e);
        dist.push_back(distance(q, t.pickup) + distance(t.pickup, t.dropoff));
    }

    double me = 0.0, md = 0.0;
    for (int i = 0; i < sample_count; ++i) {
        me += energy[i];
        md += dist[i];
    }
    me /= sample_count;
    md /= sample_count;
    double cov = 0.0, ve = 0.0, vd = 0.0;
    for (int i = 0; i < sample_count; ++i) {
        cov += (energy[i] - me) * (dist[i] - md);
        ve += (energy[i] - me) * (energy[i] - me);
        vd += (dist[i] - md) * (dist[i] - md);
    }
    if (ve <= 0.0 || vd <= 0.0) return {0.0, false};
    return {cov / std::sqrt(ve * vd), true};
}

// ---------------------------------------------------------------------------
// JSON round-trip

namespace {

using nlohmann::json;

json vec_to_json(const Vec2& v) { return json::array({v.x, v.y}); }
Vec2 vec_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

const char* layout_name(LayoutKind k) {
    switch (k) {
        case LayoutKind::grid: return "grid";
        case LayoutKind::random_uniform: return "random";
        case LayoutKind::clustered: return "clustered";
    }
    return "grid";
}

LayoutKind layout_from_name(const std::string& s) {
    if (s == "grid") return LayoutKind::grid;
    if (s == "random") return LayoutKind::random_uniform;
    if (s == "clustered") return LayoutKind::clustered;
    throw std::invalid_argument("unknown layout kind: " + s);
}

json params_to_json(const RobotParams& p) {
    return json{{"mass", p.mass},
                {"wheelbase", p.wheelbase},
                {"wheel_radius", p.wheel_radius},
                {"motor_constant", p.motor_constant},
                {"motor_resistance", p.motor_resistance},
                {"motor_inertia", p.motor_inertia},
                {"v_max", p.v_max},
                {"delta_f_max", p.delta_f_max},
                {"v_m_max", p.v_m_max},
                {"tau_b_max", p.tau_b_max},
                {"efficiency", p.efficiency},
                {"regen_fraction", p.regen_fraction},
                {"w_max", p.w_max}};
}

RobotParams params_from_json(const json& j) {
    RobotParams p;
    p.mass = j.at("mass");
    p.wheelbase = j.at("wheelbase");
    p.wheel_radius = j.at("wheel_radius");
    p.motor_constant = j.at("motor_constant");
    p.motor_resistance = j.at("motor_resistance");
    p.motor_inertia = j.at("motor_inertia");
    p.v_max = j.at("v_max");
    p.delta_f_max = j.at("delta_f_max");
    p.v_m_max = j.at("v_m_max");
    p.tau_b_max = j.at("tau_b_max");
    p.efficiency = j.at("efficiency");
    p.regen_fraction = j.at("regen_fraction");
    p.w_max = j.at("w_max");
    return p;
}

json battery_to_json(const BatteryParams& b) {
    return json{{"a1", b.a1},       {"b1", b.b1},
                {"a2", b.a2},       {"b2", b.b2},
                {"c", b.c},         {"capacity", b.capacity},
                {"soc_min", b.soc_min}, {"soc_max", b.soc_max}};
}

BatteryParams battery_from_json(const json& j) {
    BatteryParams b;
    b.a1 = j.at("a1");
    b.b1 = j.at("b1");
    b.a2 = j.at("a2");
    b.b2 = j.at("b2");
    b.c = j.at("c");
    b.capacity = j.at("capacity");
    b.soc_min = j.at("soc_min");
    b.soc_max = j.at("soc_max");
    return b;
}

json task_to_json(const Task& t) {
    return json{{"id", t.id},
                {"pickup", vec_to_json(t.pickup)},
                {"dropoff", vec_to_json(t.dropoff)},
                {"payload", t.payload},
                {"priority", t.priority},
                {"arrival_time", t.arrival_time}};
}

Task task_from_json(const json& j) {
    Task t;
    t.id = j.at("id");
    t.pickup = vec_from_json(j.at("pickup"));
    t.dropoff = vec_from_json(j.at("dropoff"));
    t.payload = j.at("payload");
    t.priority = j.at("priority");
    t.arrival_time = j.at("arrival_time");
    return t;
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
    json j;
    j["schema_version"] = sc.schema_version;
    j["seed"] = sc.seed;
    j["return_to_depot"] = sc.return_to_depot;

    json ws;
    ws["width"] = sc.workspace.width;
    ws["height"] = sc.workspace.height;
    ws["layout_kind"] = layout_name(sc.workspace.layout_kind);
    ws["keepout"] = json::array();
    for (const auto& r : sc.workspace.keepout)
        ws["keepout"].push_back(json::array({r.x, r.y, r.w, r.h}));
    j["workspace"] = ws;

    json fr;
    fr["kind"] = sc.friction.kind == FrictionKind::uniform ? "uniform" : "zoned";
    fr["uniform_mu"] = sc.friction.uniform_mu;
    fr["default_mu"] = sc.friction.default_mu;
    fr["zones"] = json::array();
    for (const auto& z : sc.friction.zones)
        fr["zones"].push_back(json{{"rect", json::array({z.rect.x, z.rect.y, z.rect.w, z.rect.h})},
                                   {"mu", z.mu}});
    j["friction"] = fr;

    j["robots"] = json::array();
    for (const auto& r : sc.robots)
        j["robots"].push_back(json{{"depot", vec_to_json(r.depot)},
                                   {"params", params_to_json(r.params)},
                                   {"battery", battery_to_json(r.battery)}});

    j["tasks"] = json::array();
    for (const auto& t : sc.tasks) j["tasks"].push_back(task_to_json(t));

    j["disruptions"] = json::array();
    for (const auto& d : sc.disruptions) {
        json e;
        e["t"] = d.t;
        switch (d.kind) {
            case DisruptionKind::fault:
                e["kind"] = "fault";
                e["robot"] = d.robot;
                break;
            case DisruptionKind::priority_task:
                e["kind"] = "priority_task";
                e["task"] = task_to_json(*d.task);
                break;
            case DisruptionKind::energy_deviation:
                e["kind"] = "energy_deviation";
                e["robot"] = d.robot;
                break;
        }
        j["disruptions"].push_back(e);
    }
    return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
    json j = json::parse(text);
    Scenario sc;
    sc.schema_version = j.at("schema_version");
    sc.seed = j.at("seed");
    sc.return_to_depot = j.value("return_to_depot", true);

    const json& ws = j.at("workspace");
    sc.workspace.width = ws.at("width");
    sc.workspace.height = ws.at("height");
    sc.workspace.layout_kind = layout_from_name(ws.at("layout_kind"));
    for (const auto& r : ws.value("keepout", json::array()))
        sc.workspace.keepout.push_back(
            {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
             r.at(3).get<double>()});

    const json& fr = j.at("friction");
    sc.friction.kind =
        fr.at("kind").get<std::string>() == "uniform" ? FrictionKind::uniform : FrictionKind::zoned;
    sc.friction.uniform_mu = fr.at("uniform_mu");
    sc.friction.default_mu = fr.at("default_mu");
    for (const auto& z : fr.value("zones", json::array())) {
        const auto& r = z.at("rect");
        sc.friction.zones.push_back(
            {Rect{r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                  r.at(3).get<double>()},
             z.at("mu").get<double>()});
    }

    for (const auto& r : j.at("robots")) {
        RobotSpec spec;
        spec.depot = vec_from_json(r.at("depot"));
        spec.params = params_from_json(r.at("params"));
        spec.battery = battery_from_json(r.at("battery"));
        sc.robots.push_back(spec);
    }
    for (const auto& t : j.at("tasks")) sc.tasks.push_back(task_from_json(t));

    for (const auto& e : j.value("disruptions", json::array())) {
        DisruptionEvent d;
        d.t = e.at("t");
        std::string kind = e.at("kind");
        if (kind == "fault") {
            d.kind = DisruptionKind::fault;
            d.robot = e.at("robot");
        } else if (kind == "priority_task") {
            d.kind = DisruptionKind::priority_task;
            d.task = task_from_json(e.at("task"));
        } else if (kind == "energy_deviation") {
            d.kind = DisruptionKind::energy_deviation;
            d.robot = e.at("robot");
        } else {
            throw std::invalid_argument("unknown disruption kind: " + kind);
        }
        sc.disruptions.push_back(d);
    }
    sc.validate();
    return sc;
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << scenario_to_json(scenario) << "\n";
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json(ss.str());
}

}  // namespace fleet
