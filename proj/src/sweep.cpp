#include "fleet/sweep.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fleet/baselines.hpp"

namespace fleet {

std::string metric_name(BidMetric m) {
    switch (m) {
        case BidMetric::energy_closed_form: return "energy";
        case BidMetric::euclidean_distance: return "distance";
        case BidMetric::zone_aware_energy: return "zoned";
        case BidMetric::exact_ocp_oracle: return "oracle";
    }
    return "energy";
}

std::string layout_name_str(LayoutKind k) {
    switch (k) {
        case LayoutKind::grid: return "grid";
        case LayoutKind::random_uniform: return "random";
        case LayoutKind::clustered: return "clustered";
    }
    return "grid";
}

namespace {

double savings_pct(double base, double variant) {
    return base > 0.0 ? (base - variant) / base * 100.0 : 0.0;
}

struct SeedOutcome {
    bool ok = false;
    std::string note;
    double energy = 0.0, b1 = 0.0, b2 = 0.0, b3 = 0.0;
    double r = 0.0;
    double reschedules = 0.0, reassigned = 0.0;
    double accuracy = 0.0, bid_error = 0.0;
    bool has_accuracy = false;
};

SeedOutcome run_cell_seed(const SweepConfig& config, const SweepCell& cell,
                          std::uint64_t seed) {
    SeedOutcome out;
    try {
        ScenarioConfig sconf = config.scenario;
        sconf.robot_count = cell.fleet_size;
        sconf.task_count = cell.task_count;
        sconf.layout = cell.layout;
        sconf.mu_lo = cell.mu_lo;
        sconf.mu_hi = cell.mu_hi;
        Scenario scenario = generate_scenario(sconf, seed);

        PipelineOptions opts = config.pipeline;
        opts.metric = cell.metric;
        PipelineResult run = run_pipeline(scenario, opts);
        out.energy = run.fleet_energy;
        out.reschedules = run.reschedule_count;
        double reassigned = 0.0;
        for (const auto& e : run.events) reassigned += e.tasks_reassigned;
        out.reassigned = run.events.empty() ? 0.0 : reassigned / run.events.size();

        if (config.with_baselines) {
            std::vector<Bidder> bidders = scenario_bidders(scenario);
            Schedule b1 = nearest_task_allocate(bidders, scenario.tasks);
            out.b1 = schedule_fleet_energy(scenario, b1, opts);

            Schedule b2 = nearest_robot_allocate(bidders, scenario.tasks);
            std::vector<Vec2> depots;
            for (const auto& r : scenario.robots) depots.push_back(r.depot);
            double cruise = opts.trajectory.v_avg_fraction * sconf.robot_params.v_max;
            out.b2 = const_velocity_energy(b2, bidders, depots, scenario.tasks,
                                           scenario.friction, cruise, scenario.return_to_depot,
                                           opts.trajectory.dt);

            PipelineOptions dist_opts = opts;
            dist_opts.metric = BidMetric::euclidean_distance;
            out.b3 = run_pipeline(scenario, dist_opts).fleet_energy;
        }

        std::vector<Vec2> stations;  // correlation draws its own positions
        CorrelationResult corr = energy_distance_correlation(
            stations, scenario.tasks, sconf.robot_params, scenario.friction,
            scenario.workspace, 200, seed);
        out.r = corr.ok ? corr.r : 0.0;

        if (config.measure_accuracy && cell.fleet_size <= 5 && cell.task_count <= 12) {
            BidContext ctx = opts.bid_context(scenario);
            RankingAccuracy acc =
                ranking_accuracy(scenario_bidders(scenario), scenario.tasks,
                                 BidMetric::energy_closed_form, BidMetric::exact_ocp_oracle,
                                 ctx);
            out.accuracy = acc.winner_accuracy;
            out.bid_error = acc.mean_abs_rel_error;
            out.has_accuracy = true;
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.note = e.what();
    }
    return out;
}

}  // namespace

SweepReport sweep(const SweepConfig& config) {
    std::vector<SweepCell> cells;
    for (int n : config.fleet_sizes)
        for (int m : config.task_counts)
            for (LayoutKind layout : config.layouts)
                for (auto [lo, hi] : config.friction_ranges)
                    for (BidMetric metric : config.metrics)
                        cells.push_back({n, m, layout, lo, hi, metric});

    std::vector<std::vector<SeedOutcome>> outcomes(cells.size());
    for (auto& v : outcomes) v.resize(config.seeds.size());

    // cell x seed units are independent; inner pipeline parallelism nests
    // serially inside this team
#pragma omp parallel for collapse(2) schedule(dynamic)
    for (long long c = 0; c < static_cast<long long>(cells.size()); ++c)
        for (long long s = 0; s < static_cast<long long>(config.seeds.size()); ++s)
            outcomes[c][s] = run_cell_seed(config, cells[c], config.seeds[s]);

    SweepReport report;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        CellReport rep;
        rep.cell = cells[c];
        std::vector<double> energy, b1, b2, b3, rs, resched, reass, accs, errs;
        for (std::size_t s = 0; s < config.seeds.size(); ++s) {
            const SeedOutcome& o = outcomes[c][s];
            if (!o.ok) {
                rep.failures.push_back("seed " + std::to_string(config.seeds[s]) + ": " +
                                       o.note);
                continue;
            }
            energy.push_back(o.energy);
            b1.push_back(o.b1);
            b2.push_back(o.b2);
            b3.push_back(o.b3);
            rs.push_back(o.r);
            resched.push_back(o.reschedules);
            reass.push_back(o.reassigned);
            if (o.has_accuracy) {
                accs.push_back(o.accuracy);
                errs.push_back(o.bid_error);
            }
        }
        rep.seeds = static_cast<int>(energy.size());
        rep.energies = energy;
        rep.b1 = b1;
        rep.b2 = b2;
        rep.b3 = b3;
        rep.energy_mean = mean(energy);
        rep.energy_std = sample_stddev(energy);
        rep.r_mean = mean(rs);
        rep.reschedules_mean = mean(resched);
        rep.tasks_reassigned_mean = mean(reass);
        if (!accs.empty()) {
            rep.winner_accuracy = mean(accs);
            rep.bid_error = mean(errs);
        }
        if (config.with_baselines && !energy.empty()) {
            std::vector<double> s1, s2, s3;
            for (std::size_t i = 0; i < energy.size(); ++i) {
                s1.push_back(savings_pct(b1[i], energy[i]));
                s2.push_back(savings_pct(b2[i], energy[i]));
                s3.push_back(savings_pct(b3[i], energy[i]));
            }
            rep.savings_b1_mean = mean(s1);
            rep.savings_b1_std = sample_stddev(s1);
            rep.savings_b2_mean = mean(s2);
            rep.savings_b2_std = sample_stddev(s2);
            rep.savings_b3_mean = mean(s3);
            rep.savings_b3_std = sample_stddev(s3);
            rep.p_b1 = wilcoxon_signed_rank(b1, energy).p_two_sided;
            rep.p_b2 = wilcoxon_signed_rank(b2, energy).p_two_sided;
            rep.p_b3 = wilcoxon_signed_rank(b3, energy).p_two_sided;
        }
        report.cells.push_back(std::move(rep));
    }
    return report;
}

// ---- flat-file exports -----------------------------------------------------

namespace {
std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out.precision(12);
    return out;
}
}  // namespace

void write_sweep_csv(const SweepReport& report, const std::string& path) {
    std::ofstream out = open_or_throw(path);
    out << "fleet_size,task_count,layout,mu_lo,mu_hi,metric,seeds,"
           "energy_mean_j,energy_std_j,"
           "savings_vs_b1_pct,savings_vs_b1_std,p_vs_b1,"
           "savings_vs_b2_pct,savings_vs_b2_std,p_vs_b2,"
           "savings_vs_b3_pct,savings_vs_b3_std,p_vs_b3,"
           "r,winner_accuracy,bid_error,reschedules,tasks_reassigned,failures\n";
    for (const auto& c : report.cells) {
        out << c.cell.fleet_size << ',' << c.cell.task_count << ','
            << layout_name_str(c.cell.layout) << ',' << c.cell.mu_lo << ',' << c.cell.mu_hi
            << ',' << metric_name(c.cell.metric) << ',' << c.seeds << ',' << c.energy_mean
            << ',' << c.energy_std << ',' << c.savings_b1_mean << ',' << c.savings_b1_std
            << ',' << c.p_b1 << ',' << c.savings_b2_mean << ',' << c.savings_b2_std << ','
            << c.p_b2 << ',' << c.savings_b3_mean << ',' << c.savings_b3_std << ',' << c.p_b3
            << ',' << c.r_mean << ',' << (c.winner_accuracy ? *c.winner_accuracy : -1.0) << ','
            << (c.bid_error ? *c.bid_error : -1.0) << ',' << c.reschedules_mean << ','
            << c.tasks_reassigned_mean << ',' << c.failures.size() << '\n';
    }
}

void write_trajectory_csv(const std::vector<RobotHistory>& histories,
                          const std::string& path) {
    std::ofstream out = open_or_throw(path);
    out << "robot,t,x,y,psi,v_x,soc,delta_f,v_m,tau_b,p_battery\n";
    for (const auto& h : histories)
        for (const auto& seg : h.segments)
            for (const auto& s : seg.samples)
                out << h.id << ',' << seg.start_time + s.t << ',' << s.state.x << ','
                    << s.state.y << ',' << s.state.heading << ',' << s.state.speed << ','
                    << s.state.soc << ',' << s.control.steer << ',' << s.control.motor_voltage
                    << ',' << s.control.brake_torque << ',' << s.power.p_battery << '\n';
}

void write_phase_csv(const std::vector<RobotHistory>& histories, const std::string& path) {
    std::ofstream out = open_or_throw(path);
    out << "robot,phase,task,kind,dl,duration,energy\n";
    for (const auto& h : histories) {
        int idx = 0;
        for (const auto& seg : h.segments)
            out << h.id << ',' << idx++ << ',' << seg.task << ','
                << (seg.phase == PhaseKind::loaded ? "loaded" : "unloaded") << ','
                << seg.path.length() << ',' << seg.realized_duration << ',' << seg.energy
                << '\n';
    }
}

void write_auction_csv(const AuctionTrace& trace, const std::string& path) {
    std::ofstream out = open_or_throw(path);
    out << "round,task,winner,winning_bid,second_best_bid\n";
    for (const auto& r : trace.rounds)
        out << r.round << ',' << r.task << ',' << r.winner << ',' << r.winning_bid << ','
            << r.second_best_bid << '\n';
}

void write_event_csv(const EventLog& events, const std::string& path) {
    std::ofstream out = open_or_throw(path);
    out << "t,kind,robot,tasks_reassigned,latency_ms,v_before,v_after\n";
    for (const auto& e : events) {
        const char* kind = e.kind == DisruptionKind::fault           ? "fault"
                           : e.kind == DisruptionKind::priority_task ? "priority_task"
                                                                     : "energy_deviation";
        out << e.t << ',' << kind << ',' << e.robot << ',' << e.tasks_reassigned << ','
            << e.latency_ms << ',' << e.v_before << ',' << e.v_after << '\n';
    }
}

void write_conflict_csv(const std::vector<ConflictWindow>& windows, const std::string& path) {
    std::ofstream out = open_or_throw(path);
    out << "robot_a,robot_b,t_start,t_end,min_sep\n";
    for (const auto& w : windows)
        out << w.robot_a << ',' << w.robot_b << ',' << w.t_start << ',' << w.t_end << ','
            << w.min_separation << '\n';
}

void write_run_summary(const PipelineResult& result, const std::string& path) {
    nlohmann::json j;
    j["fleet_energy_j"] = result.fleet_energy;
    j["makespan_s"] = result.makespan;
    j["reschedules"] = result.reschedule_count;
    j["served_tasks"] = result.served_tasks;
    j["all_tasks_served"] = result.all_tasks_served;
    j["residual_conflicts"] = result.residual_conflicts.size();
    j["events"] = nlohmann::json::array();
    for (const auto& e : result.events) {
        nlohmann::json ev;
        ev["t"] = e.t;
        ev["kind"] = e.kind == DisruptionKind::fault           ? "fault"
                     : e.kind == DisruptionKind::priority_task ? "priority_task"
                                                               : "energy_deviation";
        ev["robot"] = e.robot;
        ev["tasks_reassigned"] = e.tasks_reassigned;
        ev["v_before"] = e.v_before;
        ev["v_after"] = e.v_after;
        j["events"].push_back(ev);
    }
    std::ofstream out = open_or_throw(path);
    out << j.dump(2) << "\n";
}

}  // namespace fleet
