#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fleet/pipeline.hpp"
#include "fleet/stats.hpp"

namespace fleet {

/// One grid cell of the experiment sweep.
struct SweepCell {
    int fleet_size = 5;
    int task_count = 50;
    LayoutKind layout = LayoutKind::grid;
    double mu_lo = 0.02;
    double mu_hi = 0.02;
    BidMetric metric = BidMetric::energy_closed_form;
};

struct SweepConfig {
    std::vector<int> fleet_sizes{5, 10};
    std::vector<int> task_counts{20};
    std::vector<LayoutKind> layouts{LayoutKind::grid};
    std::vector<std::pair<double, double>> friction_ranges{{0.02, 0.02}};
    std::vector<BidMetric> metrics{BidMetric::energy_closed_form};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    ScenarioConfig scenario;   // counts/layout/friction overridden per cell
    PipelineOptions pipeline;  // metric overridden per cell
    bool with_baselines = true;
    bool measure_accuracy = false;  // closed-form vs oracle, small cells only
};

/// Aggregated metrics for one sweep cell over its seeds.
struct CellReport {
    SweepCell cell;
    int seeds = 0;
    double energy_mean = 0.0, energy_std = 0.0;
    double savings_b1_mean = 0.0, savings_b1_std = 0.0, p_b1 = 1.0;
    double savings_b2_mean = 0.0, savings_b2_std = 0.0, p_b2 = 1.0;
    double savings_b3_mean = 0.0, savings_b3_std = 0.0, p_b3 = 1.0;
    double r_mean = 0.0;
    std::optional<double> winner_accuracy;
    std::optional<double> bid_error;
    double reschedules_mean = 0.0;
    double tasks_reassigned_mean = 0.0;
    std::vector<std::string> failures;  // per-seed failure notes; sweep continues
    // raw per-seed energies for paired downstream tests
    std::vector<double> energies, b1, b2, b3;
};

struct SweepReport {
    std::vector<CellReport> cells;
};

/// Cartesian sweep: every cell times every seed, paired by construction
/// (baselines see the same scenario). Individual run failures are recorded
/// and the sweep continues.
SweepReport sweep(const SweepConfig& config);

// ---- flat-file exports -----------------------------------------------------

std::string metric_name(BidMetric m);
std::string layout_name_str(LayoutKind k);

/// results CSV: one row per cell, deterministic fields only.
void write_sweep_csv(const SweepReport& report, const std::string& path);

/// trajectory dump: robot,t,x,y,psi,v_x,soc,delta_f,v_m,tau_b,p_battery
void write_trajectory_csv(const std::vector<RobotHistory>& histories,
                          const std::string& path);

/// per-phase summary: robot,phase,task,kind,dl,duration,energy
void write_phase_csv(const std::vector<RobotHistory>& histories, const std::string& path);

/// auction trace: round,task,winner,winning_bid,second_best_bid
void write_auction_csv(const AuctionTrace& trace, const std::string& path);

/// event log: t,kind,robot,tasks_reassigned,latency_ms,v_before,v_after
void write_event_csv(const EventLog& events, const std::string& path);

/// conflict report: robot_a,robot_b,t_start,t_end,min_sep
void write_conflict_csv(const std::vector<ConflictWindow>& windows, const std::string& path);

/// single-run metrics fragment (JSON)
void write_run_summary(const PipelineResult& result, const std::string& path);

}  // namespace fleet
