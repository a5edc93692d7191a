#pragma once

#include <vector>

#include "fleet/energy.hpp"
#include "fleet/schedule.hpp"
#include "fleet/trajectory.hpp"

namespace fleet {

enum class BidMetric {
    energy_closed_form,
    euclidean_distance,
    zone_aware_energy,
    exact_ocp_oracle,
};

/// Everything a bid evaluation needs besides the robot and the task.
struct BidContext {
    const FrictionField* field = nullptr;
    const BatteryParams* batt = nullptr;          // oracle metric only
    const CostWeights* weights = nullptr;         // oracle metric only
    TrajectoryOptions trajectory;                 // oracle metric only
    // cost guard for the exact oracle
    int oracle_max_tasks = 12;
    int oracle_max_robots = 5;
};

/// A robot as the auction sees it: identity, current end position, params.
struct Bidder {
    RobotId id = 0;
    Vec2 position;
    RobotParams params;
};

struct BidRecord {
    RobotId robot;
    TaskId task;
    double value;
};

struct AuctionRound {
    int round = 0;
    TaskId task = -1;
    RobotId winner = -1;
    double winning_bid = 0.0;
    double second_best_bid = 0.0;
    std::vector<BidRecord> bids;  // every (task, robot) bid of the round
};

struct AuctionTrace {
    std::vector<AuctionRound> rounds;
    std::size_t bid_count = 0;
};

/// Single bid: cost for this robot to append the task to its route from its
/// current end position. Units are J for energy metrics and m for distance.
double bid(const Vec2& robot_end, const Task& task, const RobotParams& params,
           BidMetric metric, const BidContext& ctx);

/// Sequential single-item auction: each round awards the globally cheapest
/// (task, robot) pair, the winner's end position moves to the task dropoff.
/// Ties break on (lower robot id, lower task id). Deterministic.
std::pair<Schedule, AuctionTrace> run_auction(const std::vector<Bidder>& robots,
                                              const std::vector<Task>& tasks, BidMetric metric,
                                              const BidContext& ctx);

/// Serial reference of the per-round bid evaluation (the OpenMP kernel's
/// testing oracle).
std::vector<BidRecord> evaluate_round_serial(const std::vector<Bidder>& robots,
                                             const std::vector<Task>& pool,
                                             const std::vector<Vec2>& positions,
                                             BidMetric metric, const BidContext& ctx);
std::vector<BidRecord> evaluate_round(const std::vector<Bidder>& robots,
                                      const std::vector<Task>& pool,
                                      const std::vector<Vec2>& positions, BidMetric metric,
                                      const BidContext& ctx);

/// Argmin over a round's bids under the auction tie-break order.
const BidRecord* round_argmin(const std::vector<BidRecord>& bids);

struct RankingAccuracy {
    double winner_accuracy = 0.0;
    double mean_abs_rel_error = 0.0;
    int rounds = 0;
    int bids_compared = 0;
};

/// Replays the cheap-metric auction and scores each round's winner and bid
/// values against the oracle metric evaluated on the same candidate set.
RankingAccuracy ranking_accuracy(const std::vector<Bidder>& robots,
                                 const std::vector<Task>& tasks, BidMetric cheap_metric,
                                 BidMetric oracle_metric, const BidContext& ctx);

/// Additive suboptimality bound: auction cost (sum of winning bids) must not
/// exceed reference_cost + 2*m*eps_bar*scale, where scale is the mean
/// magnitude of all recorded bids.
bool suboptimality_bound_check(const AuctionTrace& trace, double eps_bar,
                               double reference_cost);

}  // namespace fleet
