#include "fleet/physics.hpp"

#include <cmath>

namespace fleet {

PowerSplit power_split(double p_demand, double efficiency) {
    // exponent normalized by 1 W; IEEE overflow saturates the blend correctly
    double p_batt = p_demand / (efficiency * (1.0 + std::exp(-p_demand))) +
                    p_demand * efficiency / (1.0 + std::exp(p_demand));
    return {p_batt, p_batt - p_demand};
}

namespace {

struct DriveOutputs {
    double current;       // motor current i, A
    double motor_torque;  // tau_m, N*m
    double accel;         // dv/dt, m/s^2
};

DriveOutputs drive(const RobotState& s, const ControlInput& u, const RobotParams& p,
                   double payload) {
    double i = (u.motor_voltage - p.motor_constant * s.speed / p.wheel_radius) /
               p.motor_resistance;
    double tau_m = p.motor_constant * i;
    double m_eff = p.effective_mass(payload);
    double inertia = m_eff * p.wheel_radius *
                     (1.0 + p.motor_inertia / (m_eff * p.wheel_radius * p.wheel_radius));
    return {i, tau_m, (tau_m - u.brake_torque) / inertia};
}

}  // namespace

double demand_power(const RobotState& state, const ControlInput& control,
                    const RobotParams& params, double payload, double mu) {
    DriveOutputs d = drive(state, control, params, payload);
    double mech = d.motor_torque * state.speed / params.wheel_radius;
    double copper = d.current * d.current * params.motor_resistance;
    double friction = mu * params.effective_mass(payload) * kGravity * state.speed;
    return mech + copper + friction;
}

StateDerivative derivatives(const RobotState& state, const ControlInput& control,
                            const RobotParams& params, const BatteryParams& batt,
                            double payload, double mu) {
    DriveOutputs d = drive(state, control, params, payload);

    StateDerivative out;
    out.dx = state.speed * std::cos(state.heading);
    out.dy = state.speed * std::sin(state.heading);
    out.dheading = state.speed / params.wheelbase * std::tan(control.steer);
    out.dspeed = d.accel;

    double p_demand = demand_power(state, control, params, payload, mu);
    double p_batt = power_split(p_demand, params.efficiency).p_battery;
    double ocv = batt.ocv(state.soc);
    out.dsoc = -(p_batt / ocv) / batt.capacity;

    if (!std::isfinite(out.dx) || !std::isfinite(out.dy) || !std::isfinite(out.dheading) ||
        !std::isfinite(out.dspeed) || !std::isfinite(out.dsoc))
        throw ModelFault("non-finite state derivative");
    return out;
}

namespace {

// Internal integration state: pose/speed/soc plus accumulated arc length,
// battery energy and objective, all advanced by the same RK4 step.
struct FullState {
    RobotState s;
    double arc = 0.0;
    double energy = 0.0;
    double objective = 0.0;
};

struct FullDeriv {
    double v[8];
};

FullDeriv rhs(const FullState& fs, const ControlInput& u, const RobotParams& p,
              const BatteryParams& b, const FrictionField& field,
              const IntegrateOptions& opt) {
    double mu = field.mu_at(fs.s.position());
    DriveOutputs d = drive(fs.s, u, p, opt.payload);
    double p_demand = demand_power(fs.s, u, p, opt.payload, mu);
    double p_batt = power_split(p_demand, p.efficiency).p_battery;
    double ocv = b.ocv(fs.s.soc);
    double dsoc = -(p_batt / ocv) / b.capacity;
    if (opt.clamp_soc_max && fs.s.soc >= b.soc_max && dsoc > 0.0) dsoc = 0.0;

    double yaw_rate = fs.s.speed / p.wheelbase * std::tan(u.steer);
    double soc_sag = b.soc_max - fs.s.soc;
    double running_cost = opt.weights.w1 * p_batt + opt.weights.w2 * soc_sag * soc_sag +
                          opt.weights.w3 * yaw_rate * yaw_rate;

    FullDeriv out;
    out.v[0] = fs.s.speed * std::cos(fs.s.heading);
    out.v[1] = fs.s.speed * std::sin(fs.s.heading);
    out.v[2] = yaw_rate;
    out.v[3] = d.accel;
    out.v[4] = dsoc;
    out.v[5] = fs.s.speed;
    out.v[6] = p_batt;
    out.v[7] = running_cost;
    return out;
}

FullState advance(const FullState& fs, const FullDeriv& d, double h) {
    FullState n = fs;
    n.s.x += h * d.v[0];
    n.s.y += h * d.v[1];
    n.s.heading += h * d.v[2];
    n.s.speed += h * d.v[3];
    n.s.soc += h * d.v[4];
    n.arc += h * d.v[5];
    n.energy += h * d.v[6];
    n.objective += h * d.v[7];
    return n;
}

bool finite(const FullState& fs) {
    return std::isfinite(fs.s.x) && std::isfinite(fs.s.y) && std::isfinite(fs.s.heading) &&
           std::isfinite(fs.s.speed) && std::isfinite(fs.s.soc) && std::isfinite(fs.energy) &&
           std::isfinite(fs.objective);
}

TrajectorySample make_sample(double t, const FullState& fs, const ControlInput& u,
                             const RobotParams& p, const BatteryParams& b,
                             const FrictionField& field, double payload) {
    double mu = field.mu_at(fs.s.position());
    double p_demand = demand_power(fs.s, u, p, payload, mu);
    PowerSplit split = power_split(p_demand, p.efficiency);
    double ocv = b.ocv(fs.s.soc);
    TrajectorySample sample;
    sample.t = t;
    sample.state = fs.s;
    sample.control = u;
    sample.power = {t, p_demand, split.p_loss, split.p_battery, split.p_battery / ocv, ocv};
    sample.arc_length = fs.arc;
    sample.cum_energy = fs.energy;
    return sample;
}

}  // namespace

IntegrationResult integrate_raw(const RobotState& state0, const ControlFn& control_fn,
                                double t0, double t1, const RobotParams& params,
                                const BatteryParams& batt, const FrictionField& field,
                                const IntegrateOptions& options) {
    IntegrationResult res;
    FullState fs;
    fs.s = state0;

    double span = t1 - t0;
    if (span <= 0.0) {
        res.final_state = state0;
        if (options.record_samples)
            res.samples.push_back(
                make_sample(t0, fs, control_fn(t0, fs.s, 0.0), params, batt, field,
                            options.payload));
        return res;
    }

    // uniform steps exactly covering the span
    int n_steps = std::max(1, static_cast<int>(std::llround(span / options.dt)));
    double h = span / n_steps;

    if (options.record_samples) {
        res.samples.reserve(static_cast<std::size_t>(n_steps) + 1);
        res.samples.push_back(make_sample(t0, fs, control_fn(t0, fs.s, 0.0), params, batt,
                                          field, options.payload));
    }

    for (int k = 0; k < n_steps; ++k) {
        double t = t0 + k * h;

        ControlInput u1 = control_fn(t, fs.s, fs.arc);
        FullDeriv k1 = rhs(fs, u1, params, batt, field, options);
        FullState s2 = advance(fs, k1, 0.5 * h);
        ControlInput u2 = control_fn(t + 0.5 * h, s2.s, s2.arc);
        FullDeriv k2 = rhs(s2, u2, params, batt, field, options);
        FullState s3 = advance(fs, k2, 0.5 * h);
        ControlInput u3 = control_fn(t + 0.5 * h, s3.s, s3.arc);
        FullDeriv k3 = rhs(s3, u3, params, batt, field, options);
        FullState s4 = advance(fs, k3, h);
        ControlInput u4 = control_fn(t + h, s4.s, s4.arc);
        FullDeriv k4 = rhs(s4, u4, params, batt, field, options);

        FullDeriv sum;
        for (int i = 0; i < 8; ++i)
            sum.v[i] = (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]) / 6.0;
        fs = advance(fs, sum, h);
        if (options.clamp_soc_max && fs.s.soc > batt.soc_max) fs.s.soc = batt.soc_max;

        double t_next = t + h;
        if (!finite(fs)) {
            res.status = IntegrationStatus::blowup;
            res.fault_time = t_next;
            break;
        }
        if (fs.s.soc < batt.soc_min) {
            res.status = IntegrationStatus::depleted;
            res.fault_time = t_next;
            break;
        }
        if (options.record_samples)
            res.samples.push_back(make_sample(t_next, fs, control_fn(t_next, fs.s, fs.arc),
                                              params, batt, field, options.payload));
    }

    res.final_state = fs.s;
    res.energy = fs.energy;
    res.objective = fs.objective;
    res.arc_length = fs.arc;
    return res;
}

IntegrationResult integrate(const RobotState& state0, const ControlFn& control_fn,
                            double t0, double t1, const RobotParams& params,
                            const BatteryParams& batt, const FrictionField& field,
                            const IntegrateOptions& options) {
    IntegrationResult res =
        integrate_raw(state0, control_fn, t0, t1, params, batt, field, options);
    if (res.status == IntegrationStatus::depleted)
        throw DepletionFault(-1, res.fault_time);
    if (res.status == IntegrationStatus::blowup)
        throw ModelFault("state blow-up during integration");
    return res;
}

}  // namespace fleet
