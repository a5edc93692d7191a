#include "fleet/types.hpp"

namespace fleet {

namespace {
void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}
}  // namespace

void Workspace::validate() const {
    require(width > 0.0, "workspace width must be > 0");
    require(height > 0.0, "workspace height must be > 0");
    for (const auto& r : keepout)
        require(r.w >= 0.0 && r.h >= 0.0, "keepout rect with negative extent");
}

void Task::validate(double w_max) const {
    require(pickup.finite() && dropoff.finite(), "task endpoints must be finite");
    require(payload >= 0.0 && payload <= w_max, "task payload outside [0, w_max]");
    require(arrival_time >= 0.0, "task arrival_time must be >= 0");
}

void RobotParams::validate() const {
    require(mass > 0.0, "mass must be > 0");
    require(wheelbase > 0.0, "wheelbase must be > 0");
    require(wheel_radius > 0.0, "wheel_radius must be > 0");
    require(motor_constant > 0.0, "motor_constant must be > 0");
    require(motor_resistance > 0.0, "motor_resistance must be > 0");
    require(motor_inertia > 0.0, "motor_inertia must be > 0");
    require(v_max > 0.0, "v_max must be > 0");
    require(delta_f_max > 0.0 && delta_f_max < M_PI / 2.0, "delta_f_max outside (0, pi/2)");
    require(v_m_max > 0.0, "v_m_max must be > 0");
    require(tau_b_max > 0.0, "tau_b_max must be > 0");
    require(efficiency > 0.0 && efficiency <= 1.0, "efficiency outside (0, 1]");
    require(regen_fraction >= 0.0 && regen_fraction <= 1.0, "regen_fraction outside [0, 1]");
    require(w_max > 0.0, "w_max must be > 0");
}

void BatteryParams::validate() const {
    require(capacity > 0.0, "battery capacity must be > 0");
    require(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0,
            "require 0 <= soc_min < soc_max <= 1");
    // OCV must stay positive over the operating window
    for (int i = 0; i <= 100; ++i) {
        double soc = soc_min + (soc_max - soc_min) * i / 100.0;
        require(ocv(soc) > 0.0, "OCV not positive over [soc_min, soc_max]");
    }
}

void CostWeights::validate() const {
    require(w1 >= 0.0 && w2 >= 0.0 && w3 >= 0.0, "objective weights must be >= 0");
    require(lambda_c >= 0.0, "lambda_c must be >= 0");
    require(rho >= 0.0, "rho must be >= 0");
}

void TriggerConfig::validate() const {
    require(delta > 0.0, "trigger delta must be > 0");
    require(dt_min > 0.0, "trigger dt_min must be > 0");
}

}  // namespace fleet
