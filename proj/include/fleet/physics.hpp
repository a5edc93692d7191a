#pragma once

#include <functional>
#include <vector>

#include "fleet/energy.hpp"
#include "fleet/friction.hpp"
#include "fleet/types.hpp"

namespace fleet {

/// Instantaneous electrical bookkeeping at one sample. Balance:
/// p_battery = p_demand + p_loss.
struct PowerRecord {
    double t = 0.0;
    double p_demand = 0.0;   // W
    double p_loss = 0.0;     // W
    double p_battery = 0.0;  // W
    double i_battery = 0.0;  // A
    double ocv = 0.0;        // V
};

/// Battery-side power for a given demand: sigmoid blend that tends to
/// p_demand/eta for large positive demand and eta*p_demand for large
/// negative (regenerating) demand. The exponent is normalized by 1 W.
struct PowerSplit {
    double p_battery;
    double p_loss;
};
PowerSplit power_split(double p_demand, double efficiency);

struct StateDerivative {
    double dx = 0.0;
    double dy = 0.0;
    double dheading = 0.0;
    double dspeed = 0.0;
    double dsoc = 0.0;
};

/// Right-hand side of the combined bicycle / electric-drive / battery model.
/// mu is the local rolling-friction coefficient; friction enters the demand
/// power (mu*(M+w)*g*v) while the velocity dynamics follow the drive
/// equations directly. Throws ModelFault on a non-finite derivative.
StateDerivative derivatives(const RobotState& state, const ControlInput& control,
                            const RobotParams& params, const BatteryParams& batt,
                            double payload, double mu);

/// Demand power decomposition used by derivatives(); exposed for tests and
/// power records.
double demand_power(const RobotState& state, const ControlInput& control,
                    const RobotParams& params, double payload, double mu);

struct TrajectorySample {
    double t = 0.0;
    RobotState state;
    ControlInput control;
    PowerRecord power;
    double arc_length = 0.0;  // distance traveled since segment start
    double cum_energy = 0.0;  // integral of p_battery since segment start, J
};

/// Closed-loop control source: may inspect time, current state and distance
/// traveled. Plain time-indexed control laws simply ignore the extra
/// arguments.
using ControlFn =
    std::function<ControlInput(double t, const RobotState& state, double arc_length)>;

enum class IntegrationStatus { ok, depleted, blowup };

struct IntegrationResult {
    std::vector<TrajectorySample> samples;  // includes t0 and t1 endpoints
    RobotState final_state;
    double energy = 0.0;     // integral of p_battery, J
    double objective = 0.0;  // integral of the weighted running cost
    double arc_length = 0.0;
    IntegrationStatus status = IntegrationStatus::ok;
    double fault_time = 0.0;
};

struct IntegrateOptions {
    double dt = 0.01;         // s
    double payload = 0.0;     // kg
    CostWeights weights;      // running-cost weights for the objective integral
    bool record_samples = true;
    bool clamp_soc_max = true;
};

/// Fixed-step RK4 integration of the full model over [t0, t1]. Energy and
/// objective are integrated as additional states so their quadrature keeps
/// RK4 order. Never throws; inspect status.
IntegrationResult integrate_raw(const RobotState& state0, const ControlFn& control_fn,
                                double t0, double t1, const RobotParams& params,
                                const BatteryParams& batt, const FrictionField& field,
                                const IntegrateOptions& options);

/// As integrate_raw, but SOC depletion raises DepletionFault and model
/// blow-up raises ModelFault.
IntegrationResult integrate(const RobotState& state0, const ControlFn& control_fn,
                            double t0, double t1, const RobotParams& params,
                            const BatteryParams& batt, const FrictionField& field,
                            const IntegrateOptions& options);

}  // namespace fleet
