#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleet/geometry.hpp"

namespace fleet {

using RobotId = int;
using TaskId = int;

enum class LayoutKind { grid, random_uniform, clustered };

/// Rectangular factory floor. Keepout rectangles are optional no-go regions;
/// an empty list means the constraint is vacuous.
struct Workspace {
    double width = 20.0;   // m
    double height = 20.0;  // m
    LayoutKind layout_kind = LayoutKind::grid;
    std::vector<Rect> keepout;

    bool contains(const Vec2& p) const {
        return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
    }
    bool in_keepout(const Vec2& p) const {
        for (const auto& r : keepout)
            if (r.contains(p)) return true;
        return false;
    }
    void validate() const;
};

/// One transport task: drive unloaded to the pickup, carry the payload to
/// the dropoff.
struct Task {
    TaskId id = 0;
    Vec2 pickup;
    Vec2 dropoff;
    double payload = 0.0;  // kg
    bool priority = false;
    double arrival_time = 0.0;  // s

    void validate(double w_max) const;
};

/// Electromechanical robot parameters. Nominal mass/speed/efficiency follow
/// a 50 kg industrial AMR; motor and geometry defaults are artifact choices
/// documented in the README.
struct RobotParams {
    double mass = 50.0;             // M, kg (without payload)
    double wheelbase = 0.5;         // L, m
    double wheel_radius = 0.15;     // r_w, m
    double motor_constant = 2.0;    // K_m, V*s/rad
    double motor_resistance = 0.15; // R_m, ohm
    double motor_inertia = 0.02;    // J_m, kg*m^2
    double v_max = 1.5;             // m/s
    double delta_f_max = 1.2;       // rad
    double v_m_max = 24.0;          // V
    double tau_b_max = 30.0;        // N*m
    double efficiency = 0.85;       // eta, (0,1]
    double regen_fraction = 0.7;    // eta_r, [0,1]
    double w_max = 20.0;            // kg, payload capacity

    /// Minimum turning radius implied by the steering limit.
    double turn_radius() const { return wheelbase / std::tan(delta_f_max); }
    /// Effective translating mass including payload.
    double effective_mass(double payload) const { return mass + payload; }

    void validate() const;
};

/// Open-circuit-voltage curve OCV(soc) = a1*e^(b1*soc) + a2*e^(b2*soc) + c*soc^2
/// plus capacity and operating window. Coefficients model a 24 V pack; they are
/// artifact defaults, not identified values.
struct BatteryParams {
    double a1 = 24.0;
    double b1 = 0.05;
    double a2 = -1.5;
    double b2 = -12.0;
    double c = 1.0;
    double capacity = 72000.0;  // Q, A*s (20 Ah)
    double soc_min = 0.1;
    double soc_max = 1.0;

    double ocv(double soc) const {
        return a1 * std::exp(b1 * soc) + a2 * std::exp(b2 * soc) + c * soc * soc;
    }
    void validate() const;
};

struct RobotState {
    double x = 0.0;        // m
    double y = 0.0;        // m
    double heading = 0.0;  // psi, rad
    double speed = 0.0;    // v_x, m/s
    double soc = 1.0;

    Vec2 position() const { return {x, y}; }
};

struct ControlInput {
    double steer = 0.0;          // delta_f, rad
    double motor_voltage = 0.0;  // V_m, V
    double brake_torque = 0.0;   // tau_b, N*m
};

/// Objective and coordination weights. w1 scales battery power, w2 tracks
/// SOC sag, w3 penalizes yaw rate; lambda_c weights the pairwise proximity
/// penalty and rho is the pending-task bookkeeping weight in the cost-to-go.
struct CostWeights {
    double w1 = 1.0;
    double w2 = 0.0;
    double w3 = 1e-3;
    double lambda_c = 10.0;
    double rho = 1.0;

    void validate() const;
};

/// Event trigger thresholds: relative energy deviation delta and the minimum
/// interval between deviation-triggered reschedules of the same robot.
struct TriggerConfig {
    double delta = 0.10;   // fraction
    double dt_min = 5.0;   // s

    void validate() const;
};

/// One robot entry in a scenario: parameters plus home depot.
struct RobotSpec {
    RobotParams params;
    BatteryParams battery;
    Vec2 depot;
};

// Run faults. These abort a simulation with context rather than producing
// silently wrong numbers.
struct DepletionFault : std::runtime_error {
    RobotId robot;
    double t;
    DepletionFault(RobotId r, double time)
        : std::runtime_error("battery depleted: robot " + std::to_string(r) +
                             " at t=" + std::to_string(time)),
          robot(r), t(time) {}
};

struct ModelFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfeasibleWaypoint : std::runtime_error {
    Vec2 waypoint;
    InfeasibleWaypoint(const Vec2& p, const std::string& why)
        : std::runtime_error("infeasible waypoint (" + std::to_string(p.x) + ", " +
                             std::to_string(p.y) + "): " + why),
          waypoint(p) {}
};

}  // namespace fleet
