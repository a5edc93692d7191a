#include "fleet/auction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fleet {

double bid(const Vec2& robot_end, const Task& task, const RobotParams& params,
           BidMetric metric, const BidContext& ctx) {
    switch (metric) {
        case BidMetric::euclidean_distance:
            return distance(robot_end, task.pickup) + distance(task.pickup, task.dropoff);
        case BidMetric::energy_closed_form:
            // non-zone-aware: priced at the friction of the robot's own zone
            return bid_energy_approx(robot_end, task, params,
                                     ctx.field->mu_at(robot_end));
        case BidMetric::zone_aware_energy:
            return bid_energy_zoned(robot_end, task, params, *ctx.field);
        case BidMetric::exact_ocp_oracle: {
            double transit = ordered_pair_cost(robot_end, task.pickup, 0.0, 0.0, 0.0, params,
                                               *ctx.batt, *ctx.field, *ctx.weights,
                                               ctx.trajectory);
            double loaded = ordered_pair_cost(task.pickup, task.dropoff, task.payload, 0.0,
                                              0.0, params, *ctx.batt, *ctx.field,
                                              *ctx.weights, ctx.trajectory);
            return transit + loaded;
        }
    }
    return 0.0;
}

std::vector<BidRecord> evaluate_round_serial(const std::vector<Bidder>& robots,
                                             const std::vector<Task>& pool,
                                             const std::vector<Vec2>& positions,
                                             BidMetric metric, const BidContext& ctx) {
    std::vector<BidRecord> bids;
    bids.reserve(pool.size() * robots.size());
    for (const auto& task : pool)
        for (std::size_t r = 0; r < robots.size(); ++r)
            bids.push_back({robots[r].id, task.id,
                            bid(positions[r], task, robots[r].params, metric, ctx)});
    return bids;
}

std::vector<BidRecord> evaluate_round(const std::vector<Bidder>& robots,
                                      const std::vector<Task>& pool,
                                      const std::vector<Vec2>& positions, BidMetric metric,
                                      const BidContext& ctx) {
    std::vector<BidRecord> bids(pool.size() * robots.size());
#pragma omp parallel for collapse(2) schedule(static)
    for (long long t = 0; t < static_cast<long long>(pool.size()); ++t)
        for (long long r = 0; r < static_cast<long long>(robots.size()); ++r) {
            std::size_t slot = static_cast<std::size_t>(t) * robots.size() + r;
            bids[slot] = {robots[r].id, pool[t].id,
                          bid(positions[r], pool[t], robots[r].params, metric, ctx)};
        }
    return bids;
}

const BidRecord* round_argmin(const std::vector<BidRecord>& bids) {
    const BidRecord* best = nullptr;
    for (const auto& b : bids) {
        if (!best || b.value < best->value ||
            (b.value == best->value &&
             std::tie(b.robot, b.task) < std::tie(best->robot, best->task)))
            best = &b;
    }
    return best;
}

std::pair<Schedule, AuctionTrace> run_auction(const std::vector<Bidder>& robots,
                                              const std::vector<Task>& tasks, BidMetric metric,
                                              const BidContext& ctx) {
    if (robots.empty() && !tasks.empty())
        throw std::invalid_argument("auction needs at least one robot");
    if (metric == BidMetric::exact_ocp_oracle &&
        (static_cast<int>(tasks.size()) > ctx.oracle_max_tasks ||
         static_cast<int>(robots.size()) > ctx.oracle_max_robots))
        throw std::invalid_argument("exact oracle metric refused: instance above cost guard");

    Schedule schedule;
    AuctionTrace trace;
    std::vector<Vec2> positions;
    positions.reserve(robots.size());
    for (const auto& r : robots) {
        schedule.sequences[r.id] = {};
        schedule.predicted_energy[r.id] = 0.0;
        schedule.cursor[r.id] = 0;
        positions.push_back(r.position);
    }

    std::vector<Task> pool = tasks;
    int round_no = 0;
    while (!pool.empty()) {
        std::vector<BidRecord> bids = evaluate_round(robots, pool, positions, metric, ctx);
        trace.bid_count += bids.size();
        const BidRecord* best = round_argmin(bids);

        double second = std::numeric_limits<double>::infinity();
        for (const auto& b : bids)
            if (b.value > best->value) second = std::min(second, b.value);
        if (!std::isfinite(second)) second = best->value;

        AuctionRound round;
        round.round = round_no++;
        round.task = best->task;
        round.winner = best->robot;
        round.winning_bid = best->value;
        round.second_best_bid = second;
        round.bids = std::move(bids);
        trace.rounds.push_back(std::move(round));

        schedule.sequences[best->robot].push_back(best->task);
        schedule.predicted_energy[best->robot] += best->value;

        auto it = std::find_if(pool.begin(), pool.end(),
                               [&](const Task& t) { return t.id == best->task; });
        for (std::size_t r = 0; r < robots.size(); ++r)
            if (robots[r].id == best->robot) positions[r] = it->dropoff;
        pool.erase(it);
    }
    return {std::move(schedule), std::move(trace)};
}

RankingAccuracy ranking_accuracy(const std::vector<Bidder>& robots,
                                 const std::vector<Task>& tasks, BidMetric cheap_metric,
                                 BidMetric oracle_metric, const BidContext& ctx) {
    if (oracle_metric == BidMetric::exact_ocp_oracle &&
        (static_cast<int>(tasks.size()) > ctx.oracle_max_tasks ||
         static_cast<int>(robots.size()) > ctx.oracle_max_robots))
        throw std::invalid_argument("ranking_accuracy refused: instance above cost guard");

    RankingAccuracy acc;
    std::vector<Vec2> positions;
    for (const auto& r : robots) positions.push_back(r.position);

    std::vector<Task> pool = tasks;
    double err_sum = 0.0;
    int err_n = 0;
    int hits = 0;
    while (!pool.empty()) {
        std::vector<BidRecord> cheap = evaluate_round(robots, pool, positions, cheap_metric, ctx);
        std::vector<BidRecord> oracle =
            evaluate_round(robots, pool, positions, oracle_metric, ctx);
        const BidRecord* cheap_best = round_argmin(cheap);
        const BidRecord* oracle_best = round_argmin(oracle);
        if (cheap_best->robot == oracle_best->robot && cheap_best->task == oracle_best->task)
            ++hits;
        for (std::size_t i = 0; i < cheap.size(); ++i) {
            if (oracle[i].value > 0.0) {
                err_sum += std::fabs(cheap[i].value - oracle[i].value) / oracle[i].value;
                ++err_n;
            }
        }
        ++acc.rounds;

        // the cheap metric drives the state evolution, as in the deployed auction
        auto it = std::find_if(pool.begin(), pool.end(),
                               [&](const Task& t) { return t.id == cheap_best->task; });
        for (std::size_t r = 0; r < robots.size(); ++r)
            if (robots[r].id == cheap_best->robot) positions[r] = it->dropoff;
        pool.erase(it);
    }
    acc.winner_accuracy = acc.rounds > 0 ? static_cast<double>(hits) / acc.rounds : 1.0;
    acc.mean_abs_rel_error = err_n > 0 ? err_sum / err_n : 0.0;
    acc.bids_compared = err_n;
    return acc;
}

bool suboptimality_bound_check(const AuctionTrace& trace, double eps_bar,
                               double reference_cost) {
    double auction_cost = 0.0;
    double bid_sum = 0.0;
    std::size_t bid_n = 0;
    for (const auto& round : trace.rounds) {
        auction_cost += round.winning_bid;
        for (const auto& b : round.bids) {
            bid_sum += std::fabs(b.value);
            ++bid_n;
        }
    }
    double scale = bid_n > 0 ? bid_sum / bid_n : 0.0;
    double m = static_cast<double>(trace.rounds.size());
    return auction_cost <= reference_cost + 2.0 * m * eps_bar * scale + 1e-9;
}

}  // namespace fleet
