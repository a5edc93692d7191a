#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "fleet/baselines.hpp"
#include "fleet/pipeline.hpp"
#include "fleet/scenario.hpp"
#include "fleet/stats.hpp"
#include "fleet/sweep.hpp"

namespace {

using namespace fleet;

BidMetric metric_from_name(const std::string& s) {
    if (s == "energy") return BidMetric::energy_closed_form;
    if (s == "distance") return BidMetric::euclidean_distance;
    if (s == "zoned") return BidMetric::zone_aware_energy;
    if (s == "oracle") return BidMetric::exact_ocp_oracle;
    throw CLI::ValidationError("--bid-metric", "expected energy|distance|zoned|oracle");
}

LayoutKind layout_from_cli(const std::string& s) {
    if (s == "grid") return LayoutKind::grid;
    if (s == "random") return LayoutKind::random_uniform;
    if (s == "clustered") return LayoutKind::clustered;
    throw CLI::ValidationError("--layout", "expected grid|random|clustered");
}

std::vector<double> read_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<double> v;
    double x;
    while (in >> x) v.push_back(x);
    return v;
}

std::vector<DisruptionEvent> read_disruptions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    // reuse the scenario parser by wrapping the array in a minimal document
    Scenario probe;
    nlohmann::json doc = nlohmann::json::parse(scenario_to_json(probe));
    doc["disruptions"] = j;
    return scenario_from_json(doc.dump()).disruptions;
}

int cmd_generate(const std::string& out, int robots, int tasks, const std::string& layout,
                 int stations, double mu_lo, double mu_hi, std::uint64_t seed,
                 double fault_rate, double priority_rate, bool no_return) {
    ScenarioConfig config;
    config.robot_count = robots;
    config.task_count = tasks;
    config.layout = layout_from_cli(layout);
    config.station_count = stations;
    config.mu_lo = mu_lo;
    config.mu_hi = mu_hi;
    config.fault_rate = fault_rate;
    config.priority_rate = priority_rate;
    config.return_to_depot = !no_return;
    Scenario sc = generate_scenario(config, seed);
    save_scenario(sc, out);
    std::cout << "wrote " << out << " (" << sc.robots.size() << " robots, "
              << sc.tasks.size() << " tasks, " << sc.disruptions.size() << " disruptions)\n";
    return 0;
}

int cmd_run(const std::string& scenario_path, const std::string& metric,
            const std::string& disruptions_path, const std::string& out_dir,
            bool monitor_deviation, bool cold) {
    Scenario sc = load_scenario(scenario_path);
    if (!disruptions_path.empty()) sc.disruptions = read_disruptions(disruptions_path);

    PipelineOptions options;
    options.metric = metric_from_name(metric);
    options.monitor_deviation = monitor_deviation;
    options.cold_start_reschedule = cold;

    PipelineResult result = run_pipeline(sc, options);

    std::filesystem::create_directories(out_dir);
    write_run_summary(result, out_dir + "/summary.json");
    write_trajectory_csv(result.histories, out_dir + "/trajectories.csv");
    write_phase_csv(result.histories, out_dir + "/phases.csv");
    write_auction_csv(result.initial_trace, out_dir + "/auction.csv");
    write_event_csv(result.events, out_dir + "/events.csv");
    write_conflict_csv(result.residual_conflicts, out_dir + "/residual_conflicts.csv");

    std::cout << "fleet energy: " << result.fleet_energy << " J, makespan "
              << result.makespan << " s, " << result.reschedule_count << " reschedules, "
              << result.served_tasks << " tasks served\n";
    if (!result.all_tasks_served) {
        std::cerr << "error: unserved tasks remain\n";
        return 2;
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, int seed_count, const std::string& out_dir) {
    SweepConfig config;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot read " + config_path);
        nlohmann::json j;
        in >> j;
        if (j.contains("fleet_sizes")) config.fleet_sizes = j["fleet_sizes"].get<std::vector<int>>();
        if (j.contains("task_counts")) config.task_counts = j["task_counts"].get<std::vector<int>>();
        if (j.contains("layouts")) {
            config.layouts.clear();
            for (const auto& s : j["layouts"]) config.layouts.push_back(layout_from_cli(s));
        }
        if (j.contains("friction_ranges")) {
            config.friction_ranges.clear();
            for (const auto& r : j["friction_ranges"])
                config.friction_ranges.emplace_back(r.at(0).get<double>(),
                                                    r.at(1).get<double>());
        }
        if (j.contains("metrics")) {
            config.metrics.clear();
            for (const auto& s : j["metrics"])
                config.metrics.push_back(metric_from_name(s.get<std::string>()));
        }
        if (j.contains("seeds")) config.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
        if (j.contains("stations")) config.scenario.station_count = j["stations"];
        if (j.contains("measure_accuracy")) config.measure_accuracy = j["measure_accuracy"];
        if (j.contains("fault_rate")) config.scenario.fault_rate = j["fault_rate"];
        if (j.contains("priority_rate")) config.scenario.priority_rate = j["priority_rate"];
        if (j.contains("return_to_depot"))
            config.scenario.return_to_depot = j["return_to_depot"];
    }
    if (seed_count > 0) {
        config.seeds.clear();
        for (int s = 1; s <= seed_count; ++s) config.seeds.push_back(s);
    }

    SweepReport report = sweep(config);
    std::filesystem::create_directories(out_dir);
    write_sweep_csv(report, out_dir + "/results.csv");

    int failures = 0;
    for (const auto& c : report.cells) failures += static_cast<int>(c.failures.size());
    std::cout << report.cells.size() << " cells x " << config.seeds.size()
              << " seeds -> " << out_dir << "/results.csv";
    if (failures) std::cout << " (" << failures << " failed runs)";
    std::cout << "\n";
    return failures == 0 ? 0 : 3;
}

int cmd_stats(const std::string& a_path, const std::string& b_path) {
    std::vector<double> a = read_column(a_path), b = read_column(b_path);
    WilcoxonResult w = wilcoxon_signed_rank(a, b);
    if (!w.ok) {
        std::cout << "degenerate: all paired differences are zero\n";
        return 0;
    }
    std::cout << "n=" << w.n_effective << " W+=" << w.w_plus << " p=" << w.p_two_sided
              << (w.exact ? " (exact)" : " (normal approx)") << "\n";
    return 0;
}

int cmd_trace(const std::string& scenario_path, const std::string& metric,
              const std::string& out_dir) {
    Scenario sc = load_scenario(scenario_path);
    PipelineOptions options;
    options.metric = metric_from_name(metric);
    PipelineResult result = run_pipeline(sc, options);
    std::filesystem::create_directories(out_dir);
    write_auction_csv(result.initial_trace, out_dir + "/auction.csv");
    write_trajectory_csv(result.histories, out_dir + "/trajectories.csv");
    write_phase_csv(result.histories, out_dir + "/phases.csv");
    std::cout << "trace written to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* workers = std::getenv("FLEETSIM_WORKERS")) {
#ifdef _OPENMP
        int n = std::atoi(workers);
        if (n > 0) omp_set_num_threads(n);
#endif
    }

    CLI::App app{"energy-aware fleet auction and trajectory simulator"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a scenario file");
    std::string gen_out = "scenario.json", gen_layout = "grid";
    int gen_robots = 4, gen_tasks = 20, gen_stations = 16;
    double gen_mu_lo = 0.02, gen_mu_hi = 0.02, gen_fault = 0.0, gen_prio = 0.0;
    std::uint64_t gen_seed = 1;
    bool gen_no_return = false;
    gen->add_option("--out", gen_out);
    gen->add_option("--robots", gen_robots);
    gen->add_option("--tasks", gen_tasks);
    gen->add_option("--layout", gen_layout, "grid|random|clustered");
    gen->add_option("--stations", gen_stations);
    gen->add_option("--mu-lo", gen_mu_lo);
    gen->add_option("--mu-hi", gen_mu_hi);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--fault-rate", gen_fault, "faults per second of horizon");
    gen->add_option("--priority-rate", gen_prio, "priority arrivals per second");
    gen->add_flag("--no-depot-return", gen_no_return);

    // run
    auto* run = app.add_subcommand("run", "run one pipeline");
    std::string run_scenario, run_metric = "energy", run_disruptions, run_out = "out";
    bool run_monitor = false, run_cold = false;
    run->add_option("--scenario", run_scenario)->required();
    run->add_option("--bid-metric", run_metric, "energy|distance|zoned|oracle");
    run->add_option("--disruptions", run_disruptions, "JSON disruption stream override");
    run->add_option("--out", run_out, "output directory");
    run->add_flag("--monitor-deviation", run_monitor);
    run->add_flag("--cold", run_cold, "cold-start re-auction on every trigger");

    // sweep
    auto* sw = app.add_subcommand("sweep", "run a config grid");
    std::string sw_config, sw_out = "sweep_out";
    int sw_seeds = 0;
    sw->add_option("--config", sw_config, "JSON grid file");
    sw->add_option("--seeds", sw_seeds, "use seeds 1..N (overrides config)");
    sw->add_option("--out-dir", sw_out);

    // stats
    auto* st = app.add_subcommand("stats", "Wilcoxon signed-rank over paired files");
    std::string st_a, st_b;
    st->add_option("--a", st_a)->required();
    st->add_option("--b", st_b)->required();

    // trace
    auto* tr = app.add_subcommand("trace", "dump trajectories and auction trace");
    std::string tr_scenario, tr_metric = "energy", tr_out = "trace_out";
    tr->add_option("--scenario", tr_scenario)->required();
    tr->add_option("--bid-metric", tr_metric);
    tr->add_option("--out", tr_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_generate(gen_out, gen_robots, gen_tasks, gen_layout, gen_stations,
                                gen_mu_lo, gen_mu_hi, gen_seed, gen_fault, gen_prio,
                                gen_no_return);
        if (run->parsed())
            return cmd_run(run_scenario, run_metric, run_disruptions, run_out, run_monitor,
                           run_cold);
        if (sw->parsed()) return cmd_sweep(sw_config, sw_seeds, sw_out);
        if (st->parsed()) return cmd_stats(st_a, st_b);
        if (tr->parsed()) return cmd_trace(tr_scenario, tr_metric, tr_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
