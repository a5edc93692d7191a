#include "fleet/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fleet {

double proximity_penalty(const Vec2& pos_i, const Vec2& pos_j, double d_safe) {
    double ratio = distance(pos_i, pos_j) / d_safe;
    double gap = std::max(0.0, 1.0 - ratio);
    return gap * gap;
}

namespace {

// Dense position tracks on the common clock; robots are active on [0, duration].
struct Track {
    RobotId robot;
    std::vector<Vec2> pos;  // sampled at k*dt
    double duration;
};

std::vector<Track> sample_tracks(const std::vector<RouteTrajectory>& trajectories, double dt,
                                 double horizon) {
    std::vector<Track> tracks;
    tracks.reserve(trajectories.size());
    std::size_t n_samples = static_cast<std::size_t>(std::ceil(horizon / dt)) + 1;
    for (const auto& traj : trajectories) {
        Track tr;
        tr.robot = traj.robot;
        tr.duration = traj.total_duration;
        tr.pos.reserve(n_samples);
        for (std::size_t k = 0; k < n_samples; ++k) {
            RobotState s = traj.state_at(k * dt);
            tr.pos.push_back({s.x, s.y});
        }
        tracks.push_back(std::move(tr));
    }
    return tracks;
}

std::vector<ConflictWindow> pair_windows(const Track& a, const Track& b, double d_safe,
                                         double dt) {
    std::vector<ConflictWindow> out;
    double overlap = std::min(a.duration, b.duration);
    std::size_t n = static_cast<std::size_t>(std::floor(overlap / dt));
    n = std::min({n, a.pos.size() - 1, b.pos.size() - 1});

    bool open = false;
    ConflictWindow w;
    for (std::size_t k = 0; k <= n; ++k) {
        double sep = distance(a.pos[k], b.pos[k]);
        if (sep < d_safe) {
            double t = k * dt;
            if (!open) {
                open = true;
                w = {a.robot, b.robot, t, t, sep};
            } else {
                w.t_end = t;
                w.min_separation = std::min(w.min_separation, sep);
            }
        } else if (open) {
            out.push_back(w);
            open = false;
        }
    }
    if (open) out.push_back(w);

    // merge windows separated by less than 2*dt
    std::vector<ConflictWindow> merged;
    for (const auto& win : out) {
        if (!merged.empty() && win.t_start - merged.back().t_end < 2.0 * dt) {
            merged.back().t_end = win.t_end;
            merged.back().min_separation =
                std::min(merged.back().min_separation, win.min_separation);
        } else {
            merged.push_back(win);
        }
    }
    return merged;
}

double fleet_horizon(const std::vector<RouteTrajectory>& trajectories) {
    double h = 0.0;
    for (const auto& t : trajectories) h = std::max(h, t.total_duration);
    return h;
}

}  // namespace

std::vector<ConflictWindow> detect_conflicts_serial(
    const std::vector<RouteTrajectory>& trajectories, double d_safe, double dt) {
    std::vector<Track> tracks = sample_tracks(trajectories, dt, fleet_horizon(trajectories));
    std::vector<ConflictWindow> all;
    for (std::size_t i = 0; i < tracks.size(); ++i)
        for (std::size_t j = i + 1; j < tracks.size(); ++j) {
            auto wins = pair_windows(tracks[i], tracks[j], d_safe, dt);
            all.insert(all.end(), wins.begin(), wins.end());
        }
    return all;
}

std::vector<ConflictWindow> detect_conflicts(const std::vector<RouteTrajectory>& trajectories,
                                             double d_safe, double dt) {
    std::vector<Track> tracks = sample_tracks(trajectories, dt, fleet_horizon(trajectories));
    std::size_t n = tracks.size();
    if (n < 2) return {};

    // flatten the pair index space; each pair's windows are independent and
    // spliced back in deterministic pair order
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    std::vector<std::vector<ConflictWindow>> per_pair(pairs.size());
#pragma omp parallel for schedule(dynamic)
    for (long long p = 0; p < static_cast<long long>(pairs.size()); ++p) {
        per_pair[p] =
            pair_windows(tracks[pairs[p].first], tracks[pairs[p].second], d_safe, dt);
    }

    std::vector<ConflictWindow> all;
    for (const auto& wins : per_pair) all.insert(all.end(), wins.begin(), wins.end());
    return all;
}

double total_penalty_integral(const std::vector<RouteTrajectory>& trajectories, double d_safe,
                              double dt) {
    std::vector<Track> tracks = sample_tracks(trajectories, dt, fleet_horizon(trajectories));
    double total = 0.0;
    for (std::size_t i = 0; i < tracks.size(); ++i)
        for (std::size_t j = i + 1; j < tracks.size(); ++j) {
            double overlap = std::min(tracks[i].duration, tracks[j].duration);
            std::size_t n = static_cast<std::size_t>(std::floor(overlap / dt));
            n = std::min({n, tracks[i].pos.size() - 1, tracks[j].pos.size() - 1});
            for (std::size_t k = 0; k <= n; ++k)
                total += proximity_penalty(tracks[i].pos[k], tracks[j].pos[k], d_safe) * dt;
        }
    return total;
}

namespace {

// Re-solves one segment at a stretched duration, keeping the path geometry.
// Downstream SOC traces go slightly stale (battery power does not depend on
// SOC, so downstream energies are unaffected).
bool retime_segment(RouteTrajectory& route, std::size_t idx, double gamma,
                    const RefineContext& ctx) {
    SegmentPlan& seg = route.segments[idx];
    double dl = seg.path.length();
    if (dl <= 0.0) return false;
    double new_duration = seg.realized_duration * gamma;
    double v_lo = std::max({dl / new_duration, seg.profile.v0, seg.profile.vf});
    double v_hi = ctx.params->v_max;
    if (v_lo >= v_hi) return false;

    double soc0 = seg.samples.empty() ? ctx.options.start_soc : seg.samples.front().state.soc;
    Pose start = seg.path.start;

    SegmentPlan best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 5; ++j) {
        double vc = v_lo + (v_hi - v_lo) * (j + 0.5) / 5.0;
        SpeedProfile prof = SpeedProfile::solve(dl, new_duration, seg.profile.v0,
                                                seg.profile.vf, vc, 0.5);
        if (!prof.valid) continue;
        SegmentPlan cand =
            realize_profile(start, seg.path, new_duration, prof, seg.payload, soc0,
                            *ctx.params, *ctx.batt, *ctx.field, *ctx.weights, ctx.options, true);
        if (cand.objective < best_obj) {
            best_obj = cand.objective;
            best = std::move(cand);
        }
    }
    if (!std::isfinite(best_obj)) return false;

    best.phase = seg.phase;
    best.task = seg.task;
    best.planned_duration = seg.planned_duration;
    best.start_time = seg.start_time;
    route.segments[idx] = std::move(best);

    // shift everything after the stretched segment and refresh totals
    double cursor = route.segments[idx].start_time + route.segments[idx].realized_duration;
    for (std::size_t k = idx + 1; k < route.segments.size(); ++k) {
        route.segments[k].start_time = cursor;
        cursor += route.segments[k].realized_duration;
    }
    route.total_duration = cursor;
    route.total_energy = 0.0;
    route.objective_value = 0.0;
    for (const auto& s : route.segments) {
        route.total_energy += s.energy;
        route.objective_value += s.objective;
    }
    return true;
}

std::size_t segment_covering(const RouteTrajectory& route, double t) {
    for (std::size_t i = 0; i < route.segments.size(); ++i)
        if (t <= route.segments[i].end_time()) return i;
    return route.segments.empty() ? 0 : route.segments.size() - 1;
}

}  // namespace

RefineResult refine(std::vector<RouteTrajectory> trajectories,
                    const std::vector<ConflictWindow>& conflicts, double lambda_c,
                    const RefineContext& ctx) {
    RefineResult result;
    result.penalty_before = total_penalty_integral(trajectories, ctx.d_safe, ctx.options.dt);
    if (conflicts.empty() || lambda_c <= 0.0) {
        result.trajectories = std::move(trajectories);
        result.penalty_after = result.penalty_before;
        return result;
    }

    std::map<RobotId, std::size_t> index;
    for (std::size_t i = 0; i < trajectories.size(); ++i) index[trajectories[i].robot] = i;

    double current_penalty = result.penalty_before;
    std::vector<ConflictWindow> open = conflicts;

    for (int pass = 0; pass < ctx.max_passes && !open.empty(); ++pass) {
        std::sort(open.begin(), open.end(), [](const ConflictWindow& a, const ConflictWindow& b) {
            return std::tie(a.t_start, a.robot_a, a.robot_b) <
                   std::tie(b.t_start, b.robot_a, b.robot_b);
        });

        for (const auto& window : open) {
            bool resolved = false;
            // try slowing the higher-id robot first, then the lower
            for (RobotId rid : {window.robot_b, window.robot_a}) {
                std::size_t ri = index.at(rid);
                std::size_t seg_idx = segment_covering(trajectories[ri], window.t_start);
                double current_obj = 0.0;
                for (const auto& tr : trajectories) current_obj += tr.objective_value;

                double best_score = current_obj + lambda_c * current_penalty;
                double best_penalty = current_penalty;
                double best_gamma = 0.0;
                for (double gamma : {1.15, 1.3, 1.5, 1.75}) {
                    RouteTrajectory trial = trajectories[ri];
                    if (!retime_segment(trial, seg_idx, gamma, ctx)) continue;
                    std::swap(trajectories[ri], trial);
                    double pen = total_penalty_integral(trajectories, ctx.d_safe, ctx.options.dt);
                    double obj = 0.0;
                    for (const auto& tr : trajectories) obj += tr.objective_value;
                    double score = obj + lambda_c * pen;
                    std::swap(trajectories[ri], trial);  // restore
                    if (pen < current_penalty - 1e-12 && score < best_score) {
                        best_score = score;
                        best_penalty = pen;
                        best_gamma = gamma;
                    }
                }
                if (best_gamma > 0.0) {
                    retime_segment(trajectories[ri], seg_idx, best_gamma, ctx);
                    current_penalty = best_penalty;
                    resolved = true;
                    break;
                }
            }
            (void)resolved;
        }
        open = detect_conflicts(trajectories, ctx.d_safe, ctx.options.dt);
    }

    result.penalty_after = current_penalty;
    result.residual = std::move(open);
    result.trajectories = std::move(trajectories);
    return result;
}

}  // namespace fleet
