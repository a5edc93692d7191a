#include "fleet/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fleet {

namespace {

constexpr double kTinyLength = 1e-9;
constexpr double kTrackerGain = 4.0;  // 1/s, speed-tracking feedback

double clamp(double v, double lo, double hi) { return std::max(lo, std::min(hi, v)); }

}  // namespace

double SpeedProfile::speed_at(double t) const {
    t = clamp(t, 0.0, duration);
    if (t_accel > 0.0 && t < t_accel) return v0 + (cruise - v0) * (t / t_accel);
    if (t_decel > 0.0 && t > duration - t_decel)
        return vf + (cruise - vf) * ((duration - t) / t_decel);
    return cruise;
}

double SpeedProfile::accel_at(double t) const {
    if (t < 0.0 || t > duration) return 0.0;
    if (t_accel > 0.0 && t < t_accel) return (cruise - v0) / t_accel;
    if (t_decel > 0.0 && t > duration - t_decel) return (vf - cruise) / t_decel;
    return 0.0;
}

SpeedProfile SpeedProfile::solve(double distance, double duration, double v0, double vf,
                                 double cruise, double split) {
    SpeedProfile p;
    p.v0 = v0;
    p.vf = vf;
    p.cruise = cruise;
    p.duration = duration;
    if (duration <= 0.0 || cruise < std::max(v0, vf) - 1e-12) return p;

    // surplus of cruise distance over the required distance funds the ramps
    double surplus = 2.0 * (cruise * duration - distance);
    if (surplus < -1e-9) return p;
    surplus = std::max(surplus, 0.0);

    double dv0 = cruise - v0;
    double dvf = cruise - vf;
    const double eps = 1e-12;
    if (dv0 < eps && dvf < eps) {
        if (surplus > 1e-6 * std::max(1.0, distance)) return p;  // cannot absorb surplus
        p.t_accel = 0.0;
        p.t_decel = 0.0;
    } else if (dv0 < eps) {
        p.t_accel = 0.0;
        p.t_decel = surplus / dvf;
    } else if (dvf < eps) {
        p.t_accel = surplus / dv0;
        p.t_decel = 0.0;
    } else {
        p.t_accel = split * surplus / dv0;
        p.t_decel = (1.0 - split) * surplus / dvf;
    }
    if (p.t_accel + p.t_decel > duration + 1e-9) return p;
    p.valid = true;
    return p;
}

namespace {

// Peak acceleration the drive can deliver at speed v (voltage-limited).
double max_drive_accel(double v, double payload, const RobotParams& p) {
    double i_max = (p.v_m_max - p.motor_constant * v / p.wheel_radius) / p.motor_resistance;
    double tau = p.motor_constant * std::max(i_max, 0.0);
    double m_eff = p.effective_mass(payload);
    double inertia = m_eff * p.wheel_radius + p.motor_inertia / p.wheel_radius;
    return tau / inertia;
}

double max_brake_decel(double payload, const RobotParams& p) {
    double m_eff = p.effective_mass(payload);
    double inertia = m_eff * p.wheel_radius + p.motor_inertia / p.wheel_radius;
    return p.tau_b_max / inertia;
}

// Inverse-dynamics tracker: realizes the reference speed profile along the
// Dubins path. Steering follows the path curvature at the robot's own arc
// progress; longitudinal control inverts the drive model with a proportional
// speed correction.
ControlFn make_tracker(const DubinsPath& path, const SpeedProfile& profile, double payload,
                       const RobotParams& params, bool regen_enabled) {
    return [path, profile, payload, params, regen_enabled](double t, const RobotState& s,
                                                           double arc) {
        ControlInput u;
        double kappa = path.curvature(arc);
        u.steer = clamp(std::atan(params.wheelbase * kappa), -params.delta_f_max,
                        params.delta_f_max);

        double v_ref = profile.speed_at(t);
        double a_cmd = profile.accel_at(t) + kTrackerGain * (v_ref - s.speed);
        double m_eff = params.effective_mass(payload);
        double inertia = m_eff * params.wheel_radius + params.motor_inertia / params.wheel_radius;
        double tau_net = a_cmd * inertia;
        double back_emf = params.motor_constant * s.speed / params.wheel_radius;

        if (tau_net >= 0.0) {
            double i = tau_net / params.motor_constant;
            u.motor_voltage = clamp(i * params.motor_resistance + back_emf, 0.0, params.v_m_max);
            u.brake_torque = 0.0;
        } else if (regen_enabled) {
            // brake through the motor first, friction brake for the remainder
            double v_des = back_emf + (tau_net / params.motor_constant) * params.motor_resistance;
            u.motor_voltage = clamp(v_des, 0.0, params.v_m_max);
            double tau_m = params.motor_constant * (u.motor_voltage - back_emf) /
                           params.motor_resistance;
            u.brake_torque = clamp(tau_m - tau_net, 0.0, params.tau_b_max);
        } else {
            // hold zero motor current, dissipate in the friction brake
            u.motor_voltage = clamp(back_emf, 0.0, params.v_m_max);
            u.brake_torque = clamp(-tau_net, 0.0, params.tau_b_max);
        }
        return u;
    };
}

SegmentPlan zero_phase(const Pose& at, double soc, double v_boundary) {
    SegmentPlan plan;
    plan.path.start = at;
    plan.path.segment_lengths = {0.0, 0.0, 0.0};
    plan.profile.v0 = v_boundary;
    plan.profile.vf = v_boundary;
    plan.profile.valid = true;
    TrajectorySample s;
    s.state = {at.position.x, at.position.y, at.heading, v_boundary, soc};
    plan.samples = {s};
    return plan;
}

}  // namespace

SegmentPlan realize_profile(const Pose& start, const DubinsPath& path, double duration,
                            const SpeedProfile& profile, double payload, double soc0,
                            const RobotParams& params, const BatteryParams& batt,
                            const FrictionField& field, const CostWeights& weights,
                            const TrajectoryOptions& options, bool record_samples) {
    SegmentPlan plan;
    plan.path = path;
    plan.profile = profile;
    plan.payload = payload;

    RobotState s0{start.position.x, start.position.y, start.heading, profile.v0, soc0};
    IntegrateOptions iopt;
    iopt.dt = options.dt;
    iopt.payload = payload;
    iopt.weights = weights;
    iopt.record_samples = record_samples;

    ControlFn tracker = make_tracker(path, profile, payload, params, options.regen_enabled);
    IntegrationResult res =
        integrate_raw(s0, tracker, 0.0, duration, params, batt, field, iopt);

    plan.samples = std::move(res.samples);
    plan.energy = res.energy;
    plan.objective = res.objective;
    plan.realized_duration = duration;
    if (res.status == IntegrationStatus::depleted) {
        plan.objective = std::numeric_limits<double>::infinity();
        plan.energy = std::numeric_limits<double>::infinity();
    } else if (res.status == IntegrationStatus::blowup) {
        throw ModelFault("trajectory integration blew up");
    }
    return plan;
}

SegmentPlan plan_segment(const Pose& start, const Pose& goal, double v0, double vf,
                         double payload, double soc0, const RobotParams& params,
                         const BatteryParams& batt, const FrictionField& field,
                         const CostWeights& weights, const TrajectoryOptions& options) {
    DubinsPath path = dubins_shortest(start, goal, params.turn_radius());
    double dl = path.length();
    if (dl < kTinyLength && std::fabs(v0 - vf) < 1e-12) {
        SegmentPlan plan = zero_phase(start, soc0, v0);
        return plan;
    }

    double v_avg = options.v_avg_fraction * params.v_max;
    double planned_duration = dl / v_avg;

    auto ramps_feasible = [&](const SpeedProfile& p) {
        if (!p.valid) return false;
        if (p.t_accel > 0.0) {
            double a = (p.cruise - p.v0) / p.t_accel;
            if (a > options.ramp_margin * max_drive_accel(p.cruise, payload, params))
                return false;
        } else if (p.cruise - p.v0 > 1e-9) {
            return false;
        }
        if (p.t_decel > 0.0) {
            double d = (p.cruise - p.vf) / p.t_decel;
            double brake = max_brake_decel(payload, params);
            if (options.regen_enabled)
                brake += max_drive_accel(0.0, payload, params);  // motor braking authority
            if (d > options.ramp_margin * brake) return false;
        } else if (p.cruise - p.vf > 1e-9) {
            return false;
        }
        return true;
    };

    // The timing law can be actuator-infeasible (very short hops) or leave no
    // room for the boundary speeds (fast handoffs); scan duration scales
    // around the planned value until some profile fits.
    double duration = planned_duration;
    double v_hi = params.v_max;
    double v_lo = std::max({dl / duration, v0, vf});
    SpeedProfile nominal;
    bool found = false;
    const double scales[] = {1.0,   1.5,   1.0 / 1.5, 2.25,  1.0 / 2.25,
                             3.375, 1.0 / 3.375, 5.0625, 1.0 / 5.0625, 7.59375};
    for (double scale : scales) {
        double cand_duration = planned_duration * scale;
        double lo = std::max({dl / cand_duration, v0, vf});
        if (lo > v_hi) continue;
        SpeedProfile mid = SpeedProfile::solve(dl, cand_duration, v0, vf,
                                               std::min(v_hi, 0.5 * (lo + v_hi)), 0.5);
        if (ramps_feasible(mid)) {
            nominal = mid;
            duration = cand_duration;
            v_lo = lo;
            found = true;
            break;
        }
        for (int j = 0; j < 12 && !found; ++j) {
            double vc = lo + (v_hi - lo) * (j + 0.5) / 12.0;
            for (double sp : {0.2, 0.35, 0.5, 0.65, 0.8}) {
                SpeedProfile cand = SpeedProfile::solve(dl, cand_duration, v0, vf, vc, sp);
                if (ramps_feasible(cand)) {
                    nominal = cand;
                    duration = cand_duration;
                    v_lo = lo;
                    found = true;
                    break;
                }
            }
        }
        if (found) break;
    }
    if (!found)
        throw ModelFault("plan_segment: no actuator-feasible speed profile for this phase");

    auto evaluate = [&](double vc, double split, SpeedProfile* out) {
        SpeedProfile cand = SpeedProfile::solve(dl, duration, v0, vf, vc, split);
        if (!ramps_feasible(cand)) return std::numeric_limits<double>::infinity();
        SegmentPlan trial = realize_profile(start, path, duration, cand, payload, soc0, params,
                                            batt, field, weights, options, false);
        if (out) *out = cand;
        return trial.objective;
    };

    // Coordinate descent on (cruise, split) starting from the nominal profile.
    double best_vc = nominal.cruise;
    double best_split = (nominal.t_accel + nominal.t_decel) > 0.0
                            ? nominal.t_accel * (nominal.cruise - nominal.v0) /
                                  std::max(2.0 * (nominal.cruise * duration - dl), 1e-12)
                            : 0.5;
    best_split = clamp(best_split, 0.1, 0.9);
    double best_obj = evaluate(best_vc, best_split, nullptr);

    double span_v = v_hi - v_lo;
    double span_s = 0.8;
    for (int sweep = 0; sweep < options.descent_sweeps; ++sweep) {
        // cruise scan
        for (int j = 0; j < options.scan_points; ++j) {
            double lo = std::max(v_lo + 1e-9, best_vc - 0.5 * span_v);
            double hi = std::min(v_hi, best_vc + 0.5 * span_v);
            double vc = lo + (hi - lo) * j / std::max(options.scan_points - 1, 1);
            double obj = evaluate(vc, best_split, nullptr);
            if (obj < best_obj) {
                best_obj = obj;
                best_vc = vc;
            }
        }
        // split scan
        for (int j = 0; j < options.scan_points; ++j) {
            double lo = std::max(0.1, best_split - 0.5 * span_s);
            double hi = std::min(0.9, best_split + 0.5 * span_s);
            double sp = lo + (hi - lo) * j / std::max(options.scan_points - 1, 1);
            double obj = evaluate(best_vc, sp, nullptr);
            if (obj < best_obj) {
                best_obj = obj;
                best_split = sp;
            }
        }
        span_v *= 0.5;
        span_s *= 0.5;
    }

    // finite-difference polish on the cruise speed
    double h = 1e-3 * (v_hi - v_lo);
    for (int it = 0; it < 3 && h > 0.0; ++it) {
        for (double vc : {best_vc - h, best_vc + h}) {
            if (vc <= v_lo || vc > v_hi) continue;
            double obj = evaluate(vc, best_split, nullptr);
            if (obj < best_obj) {
                best_obj = obj;
                best_vc = vc;
            }
        }
        h *= 0.5;
    }

    if (!std::isfinite(best_obj)) {
        // a profile existed but every integration ran the battery dry
        throw DepletionFault(-1, 0.0);
    }

    SpeedProfile best = SpeedProfile::solve(dl, duration, v0, vf, best_vc, best_split);
    SegmentPlan plan = realize_profile(start, path, duration, best, payload, soc0, params,
                                       batt, field, weights, options, true);
    plan.planned_duration = planned_duration;
    return plan;
}

namespace {

std::vector<Pose> waypoint_poses(const std::vector<Waypoint>& wps) {
    std::vector<Pose> poses(wps.size());
    for (std::size_t i = 0; i < wps.size(); ++i) poses[i].position = wps[i].point;
    // depot start heading is pinned to zero; interior waypoints face the next
    // stop; the final waypoint keeps the incoming bearing
    poses[0].heading = 0.0;
    for (std::size_t i = 1; i < wps.size(); ++i) {
        Vec2 from = wps[i].point;
        if (i + 1 < wps.size() && distance(from, wps[i + 1].point) > kTinyLength)
            poses[i].heading = bearing(from, wps[i + 1].point);
        else if (distance(wps[i - 1].point, from) > kTinyLength)
            poses[i].heading = bearing(wps[i - 1].point, from);
        else
            poses[i].heading = poses[i - 1].heading;
    }
    return poses;
}

}  // namespace

RouteTrajectory optimize_route_from(const Pose& start, double start_soc,
                                    const std::vector<Task>& sequence,
                                    const Vec2* return_depot, const RobotParams& params,
                                    const BatteryParams& batt, const FrictionField& field,
                                    const Workspace& workspace, const CostWeights& weights,
                                    const TrajectoryOptions& options) {
    RouteTrajectory route;
    route.final_state = {start.position.x, start.position.y, start.heading, 0.0, start_soc};

    std::vector<Waypoint> wps =
        waypoint_list(start.position, sequence, options.return_to_depot && return_depot);
    if (return_depot && options.return_to_depot) {
        if (!sequence.empty())
            wps.back().point = *return_depot;
        else if (distance(start.position, *return_depot) > kTinyLength)
            wps.push_back({*return_depot, PhaseKind::unloaded, -1});  // bare return leg
    }
    if (wps.size() < 2) return route;

    for (std::size_t i = 0; i < wps.size(); ++i) {
        if (!workspace.contains(wps[i].point))
            throw InfeasibleWaypoint(wps[i].point, "outside workspace");
        if (workspace.in_keepout(wps[i].point))
            throw InfeasibleWaypoint(wps[i].point, "inside keepout region");
    }

    std::vector<Pose> poses = waypoint_poses(wps);
    poses[0].heading = start.heading;

    double t_cursor = 0.0;
    double soc = start_soc;
    std::map<TaskId, double> task_payload;
    for (const auto& task : sequence) task_payload[task.id] = task.payload;

    for (std::size_t i = 0; i + 1 < wps.size(); ++i) {
        const Waypoint& to = wps[i + 1];
        double payload = (to.arrival_phase == PhaseKind::loaded) ? task_payload[to.task] : 0.0;
        SegmentPlan plan;
        try {
            plan = plan_segment(poses[i], poses[i + 1], 0.0, 0.0, payload, soc, params, batt,
                                field, weights, options);
        } catch (const DepletionFault&) {
            route.total_duration = t_cursor;
            throw RouteDepletionFault(route.robot, t_cursor, std::move(route));
        }
        plan.phase = to.arrival_phase;
        plan.task = to.task;
        plan.start_time = t_cursor;
        t_cursor += plan.realized_duration;
        if (!plan.samples.empty()) soc = plan.samples.back().state.soc;
        route.total_energy += plan.energy;
        route.objective_value += plan.objective;
        route.segments.push_back(std::move(plan));
    }
    route.total_duration = t_cursor;
    route.final_state = {poses.back().position.x, poses.back().position.y,
                         poses.back().heading, 0.0, soc};
    return route;
}

RouteTrajectory optimize_route(const Vec2& depot, const std::vector<Task>& sequence,
                               const RobotParams& params, const BatteryParams& batt,
                               const FrictionField& field, const Workspace& workspace,
                               const CostWeights& weights, const TrajectoryOptions& options) {
    Pose start{depot, 0.0};
    return optimize_route_from(start, options.start_soc, sequence, &depot, params, batt, field,
                               workspace, weights, options);
}

double ordered_pair_cost(const Vec2& a, const Vec2& b, double payload, double v_minus,
                         double v_plus, const RobotParams& params, const BatteryParams& batt,
                         const FrictionField& field, const CostWeights& weights,
                         const TrajectoryOptions& options) {
    if (distance(a, b) < kTinyLength && std::fabs(v_minus - v_plus) < 1e-12) return 0.0;
    double psi = bearing(a, b);
    SegmentPlan plan = plan_segment({a, psi}, {b, psi}, v_minus, v_plus, payload,
                                    options.start_soc, params, batt, field, weights, options);
    return plan.objective;
}

RobotState RouteTrajectory::state_at(double t) const {
    if (segments.empty()) return final_state;
    if (t <= 0.0) {
        const auto& first = segments.front();
        if (!first.samples.empty()) return first.samples.front().state;
        return final_state;
    }
    for (const auto& seg : segments) {
        if (t <= seg.end_time() && !seg.samples.empty()) {
            double local = t - seg.start_time;
            std::size_t idx = 0;
            if (seg.samples.size() > 1 && seg.realized_duration > 0.0) {
                double step = seg.realized_duration / (seg.samples.size() - 1);
                idx = std::min(seg.samples.size() - 1,
                               static_cast<std::size_t>(std::max(0.0, local / step)));
            }
            return seg.samples[idx].state;
        }
    }
    return final_state;
}

double RouteTrajectory::energy_up_to(double t) const {
    double total = 0.0;
    for (const auto& seg : segments) {
        if (t >= seg.end_time()) {
            total += seg.energy;
            continue;
        }
        if (t > seg.start_time && !seg.samples.empty()) {
            double local = t - seg.start_time;
            std::size_t idx = 0;
            if (seg.samples.size() > 1 && seg.realized_duration > 0.0) {
                double step = seg.realized_duration / (seg.samples.size() - 1);
                idx = std::min(seg.samples.size() - 1,
                               static_cast<std::size_t>(std::max(0.0, local / step)));
            }
            total += seg.samples[idx].cum_energy;
        }
        break;
    }
    return total;
}

double RouteTrajectory::progress_at(double t) const {
    double total_len = 0.0;
    for (const auto& seg : segments) total_len += seg.path.length();
    if (total_len <= 0.0) return 1.0;
    double done = 0.0;
    for (const auto& seg : segments) {
        if (t >= seg.end_time()) {
            done += seg.path.length();
            continue;
        }
        if (t > seg.start_time && !seg.samples.empty()) {
            double local = t - seg.start_time;
            std::size_t idx = 0;
            if (seg.samples.size() > 1 && seg.realized_duration > 0.0) {
                double step = seg.realized_duration / (seg.samples.size() - 1);
                idx = std::min(seg.samples.size() - 1,
                               static_cast<std::size_t>(std::max(0.0, local / step)));
            }
            done += seg.samples[idx].arc_length;
        }
        break;
    }
    return clamp(done / total_len, 0.0, 1.0);
}

}  // namespace fleet
