#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "fleet/auction.hpp"
#include "fleet/rng.hpp"

using namespace fleet;

namespace {

const FrictionField kField = FrictionField::uniform(0.02);
const BatteryParams kBatt{};
const CostWeights kWeights{};

BidContext context() {
    BidContext ctx;
    ctx.field = &kField;
    ctx.batt = &kBatt;
    ctx.weights = &kWeights;
    ctx.trajectory.return_to_depot = false;
    return ctx;
}

Task make_task(TaskId id, Vec2 p, Vec2 d, double payload = 0.0) {
    Task t;
    t.id = id;
    t.pickup = p;
    t.dropoff = d;
    t.payload = payload;
    return t;
}

std::vector<Bidder> two_corner_robots() {
    return {{0, {0, 0}, RobotParams{}}, {1, {20, 20}, RobotParams{}}};
}

std::set<TaskId> ids(const std::vector<Task>& tasks) {
    std::set<TaskId> s;
    for (const auto& t : tasks) s.insert(t.id);
    return s;
}

}  // namespace

TEST_CASE("distance bid is plain geometry") {
    BidContext ctx = context();
    Task t = make_task(0, {3, 4}, {3, 8});
    CHECK(bid({0, 0}, t, RobotParams{}, BidMetric::euclidean_distance, ctx) ==
          doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("energy bid delegates to the closed form") {
    BidContext ctx = context();
    Task t = make_task(0, {2, 0}, {5, 0}, 5.0);
    CHECK(bid({0, 0}, t, RobotParams{}, BidMetric::energy_closed_form, ctx) ==
          doctest::Approx(bid_energy_approx({0, 0}, t, RobotParams{}, 0.02)).epsilon(1e-12));
}

TEST_CASE("single robot wins the single task") {
    std::vector<Bidder> robots{{0, {0, 0}, RobotParams{}}};
    std::vector<Task> tasks{make_task(0, {1, 0}, {2, 0})};
    auto [schedule, trace] = run_auction(robots, tasks, BidMetric::energy_closed_form,
                                         context());
    CHECK(schedule.sequences[0] == std::vector<TaskId>{0});
    CHECK(trace.rounds.size() == 1);
    CHECK(validate_partition(schedule, ids(tasks)));
}

TEST_CASE("zero tasks produce an empty schedule and trace") {
    auto [schedule, trace] =
        run_auction(two_corner_robots(), {}, BidMetric::energy_closed_form, context());
    CHECK(trace.rounds.empty());
    CHECK(trace.bid_count == 0);
    CHECK(schedule.sequences[0].empty());
    CHECK(schedule.sequences[1].empty());
}

TEST_CASE("empty fleet with tasks is rejected") {
    std::vector<Task> tasks{make_task(0, {1, 0}, {2, 0})};
    CHECK_THROWS_AS(run_auction({}, tasks, BidMetric::energy_closed_form, context()),
                    std::invalid_argument);
}

TEST_CASE("separable corner instance matches the enumerated optimum") {
    std::vector<Task> tasks{make_task(0, {1, 1}, {3, 1}), make_task(1, {19, 19}, {17, 19})};
    for (BidMetric metric :
         {BidMetric::energy_closed_form, BidMetric::euclidean_distance}) {
        auto [schedule, trace] = run_auction(two_corner_robots(), tasks, metric, context());
        CHECK(schedule.sequences[0] == std::vector<TaskId>{0});
        CHECK(schedule.sequences[1] == std::vector<TaskId>{1});
    }
}

TEST_CASE("auction bid accounting matches the loop structure") {
    Rng rng(31);
    for (int n : {1, 3, 5}) {
        for (int m : {0, 1, 4, 9}) {
            std::vector<Bidder> robots;
            for (int r = 0; r < n; ++r)
                robots.push_back(
                    {r, {rng.uniform(0, 20), rng.uniform(0, 20)}, RobotParams{}});
            std::vector<Task> tasks;
            for (int t = 0; t < m; ++t)
                tasks.push_back(make_task(t, {rng.uniform(0, 20), rng.uniform(0, 20)},
                                          {rng.uniform(0, 20), rng.uniform(0, 20)},
                                          rng.uniform(0, 20)));
            auto [schedule, trace] =
                run_auction(robots, tasks, BidMetric::energy_closed_form, context());
            CHECK(trace.bid_count ==
                  static_cast<std::size_t>(n) * m * (m + 1) / 2);
            CHECK(validate_partition(schedule, ids(tasks)));
            CHECK(trace.rounds.size() == static_cast<std::size_t>(m));
        }
    }
}

TEST_CASE("parallel round evaluation matches the serial reference") {
    Rng rng(17);
    std::vector<Bidder> robots;
    for (int r = 0; r < 7; ++r)
        robots.push_back({r, {rng.uniform(0, 20), rng.uniform(0, 20)}, RobotParams{}});
    std::vector<Task> pool;
    for (int t = 0; t < 23; ++t)
        pool.push_back(make_task(t, {rng.uniform(0, 20), rng.uniform(0, 20)},
                                 {rng.uniform(0, 20), rng.uniform(0, 20)},
                                 rng.uniform(0, 20)));
    std::vector<Vec2> positions;
    for (const auto& r : robots) positions.push_back(r.position);

    auto par = evaluate_round(robots, pool, positions, BidMetric::energy_closed_form,
                              context());
    auto ser = evaluate_round_serial(robots, pool, positions, BidMetric::energy_closed_form,
                                     context());
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].robot == ser[i].robot);
        CHECK(par[i].task == ser[i].task);
        CHECK(par[i].value == ser[i].value);
    }
}

TEST_CASE("determinism: identical inputs give identical traces") {
    Rng rng(23);
    std::vector<Bidder> robots;
    for (int r = 0; r < 4; ++r)
        robots.push_back({r, {rng.uniform(0, 20), rng.uniform(0, 20)}, RobotParams{}});
    std::vector<Task> tasks;
    for (int t = 0; t < 12; ++t)
        tasks.push_back(make_task(t, {rng.uniform(0, 20), rng.uniform(0, 20)},
                                  {rng.uniform(0, 20), rng.uniform(0, 20)},
                                  rng.uniform(0, 20)));
    auto [s1, t1] = run_auction(robots, tasks, BidMetric::energy_closed_form, context());
    auto [s2, t2] = run_auction(robots, tasks, BidMetric::energy_closed_form, context());
    CHECK(s1.sequences == s2.sequences);
    REQUIRE(t1.rounds.size() == t2.rounds.size());
    for (std::size_t i = 0; i < t1.rounds.size(); ++i) {
        CHECK(t1.rounds[i].winner == t2.rounds[i].winner);
        CHECK(t1.rounds[i].task == t2.rounds[i].task);
        CHECK(t1.rounds[i].winning_bid == t2.rounds[i].winning_bid);
    }
}

TEST_CASE("monotonicity: lowering the winning bid keeps the winner") {
    Rng rng(41);
    std::vector<Bidder> robots;
    for (int r = 0; r < 4; ++r)
        robots.push_back({r, {rng.uniform(0, 20), rng.uniform(0, 20)}, RobotParams{}});
    std::vector<Task> tasks;
    for (int t = 0; t < 8; ++t)
        tasks.push_back(make_task(t, {rng.uniform(0, 20), rng.uniform(0, 20)},
                                  {rng.uniform(0, 20), rng.uniform(0, 20)},
                                  rng.uniform(0, 20)));
    auto [schedule, trace] =
        run_auction(robots, tasks, BidMetric::energy_closed_form, context());
    for (const auto& round : trace.rounds) {
        std::vector<BidRecord> lowered = round.bids;
        for (auto& b : lowered)
            if (b.robot == round.winner && b.task == round.task) b.value *= 0.5;
        const BidRecord* best = round_argmin(lowered);
        CHECK(best->robot == round.winner);
        CHECK(best->task == round.task);
    }
}

TEST_CASE("scale invariance: winners are unchanged under positive scaling") {
    Rng rng(43);
    std::vector<Bidder> robots;
    for (int r = 0; r < 5; ++r)
        robots.push_back({r, {rng.uniform(0, 20), rng.uniform(0, 20)}, RobotParams{}});
    std::vector<Task> tasks;
    for (int t = 0; t < 10; ++t)
        tasks.push_back(make_task(t, {rng.uniform(0, 20), rng.uniform(0, 20)},
                                  {rng.uniform(0, 20), rng.uniform(0, 20)}));
    auto [schedule, trace] =
        run_auction(robots, tasks, BidMetric::energy_closed_form, context());
    for (const auto& round : trace.rounds) {
        std::vector<BidRecord> scaled = round.bids;
        for (auto& b : scaled) b.value *= 37.5;
        const BidRecord* best = round_argmin(scaled);
        CHECK(best->robot == round.winner);
        CHECK(best->task == round.task);
    }
}

TEST_CASE("ties break on lower robot id then lower task id") {
    // two robots equidistant from one task
    std::vector<Bidder> robots{{3, {0, 0}, RobotParams{}}, {1, {10, 0}, RobotParams{}}};
    std::vector<Task> tasks{make_task(5, {5, 0}, {5, 3})};
    auto [schedule, trace] =
        run_auction(robots, tasks, BidMetric::euclidean_distance, context());
    CHECK(trace.rounds[0].winner == 1);
}

TEST_CASE("self comparison scores perfectly") {
    Rng rng(53);
    std::vector<Bidder> robots{{0, {2, 2}, RobotParams{}}, {1, {18, 18}, RobotParams{}}};
    std::vector<Task> tasks;
    for (int t = 0; t < 6; ++t)
        tasks.push_back(make_task(t, {rng.uniform(0, 20), rng.uniform(0, 20)},
                                  {rng.uniform(0, 20), rng.uniform(0, 20)},
                                  rng.uniform(0, 20)));
    RankingAccuracy acc = ranking_accuracy(robots, tasks, BidMetric::energy_closed_form,
                                           BidMetric::energy_closed_form, context());
    CHECK(acc.winner_accuracy == doctest::Approx(1.0));
    CHECK(acc.mean_abs_rel_error == doctest::Approx(0.0));
}

TEST_CASE("distance and closed-form energy rank identically at zero payload") {
    Rng rng(59);
    std::vector<Bidder> robots;
    for (int r = 0; r < 4; ++r)
        robots.push_back({r, {rng.uniform(0, 20), rng.uniform(0, 20)}, RobotParams{}});
    std::vector<Task> tasks;
    for (int t = 0; t < 10; ++t)
        tasks.push_back(make_task(t, {rng.uniform(0, 20), rng.uniform(0, 20)},
                                  {rng.uniform(0, 20), rng.uniform(0, 20)}, 0.0));
    RankingAccuracy acc = ranking_accuracy(robots, tasks, BidMetric::euclidean_distance,
                                           BidMetric::energy_closed_form, context());
    CHECK(acc.winner_accuracy == doctest::Approx(1.0));
}

TEST_CASE("oracle metric is guarded against large instances") {
    BidContext ctx = context();
    ctx.oracle_max_tasks = 4;
    std::vector<Bidder> robots{{0, {0, 0}, RobotParams{}}};
    std::vector<Task> tasks;
    for (int t = 0; t < 6; ++t) tasks.push_back(make_task(t, {1, 1}, {2, 2}));
    CHECK_THROWS_AS(run_auction(robots, tasks, BidMetric::exact_ocp_oracle, ctx),
                    std::invalid_argument);
}

TEST_CASE("suboptimality bound collapses at zero error") {
    std::vector<Bidder> robots{{0, {0, 0}, RobotParams{}}, {1, {20, 20}, RobotParams{}}};
    std::vector<Task> tasks{make_task(0, {1, 1}, {3, 1}), make_task(1, {19, 19}, {17, 19})};
    auto [schedule, trace] =
        run_auction(robots, tasks, BidMetric::energy_closed_form, context());
    double auction_cost = 0.0;
    for (const auto& r : trace.rounds) auction_cost += r.winning_bid;
    CHECK(suboptimality_bound_check(trace, 0.0, auction_cost));
    CHECK_FALSE(suboptimality_bound_check(trace, 0.0, auction_cost * 0.5));
    CHECK(suboptimality_bound_check(trace, 10.0, auction_cost * 0.5));
}
