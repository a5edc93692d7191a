#include "fleet/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace fleet {

namespace {

// Friction work and kinetic term combined per the closed-form model, with the
// friction integral already evaluated (mu*s for uniform fields).
double leg_energy(double mu_integral, double mass_eff, double v0, double vf,
                  const RobotParams& params, bool regen_enabled) {
    double friction = mu_integral * mass_eff * kGravity;
    double kinetic = 0.5 * mass_eff * (vf * vf - v0 * v0);
    if (kinetic >= 0.0) return (friction + kinetic) / params.efficiency;
    if (regen_enabled)
        return friction / params.efficiency + params.regen_fraction * kinetic;
    return std::max((friction + kinetic) / params.efficiency, 0.0);
}

double clamped_leg_energy(double mu_integral, double mass_eff, double v0, double vf,
                          const RobotParams& params) {
    // bid form: kinetic term clamped at zero, (x)+.
    double friction = mu_integral * mass_eff * kGravity;
    double kinetic = std::max(0.5 * mass_eff * (vf * vf - v0 * v0), 0.0);
    return (friction + kinetic) / params.efficiency;
}

}  // namespace

double segment_energy(const SegmentSpec& spec, const RobotParams& params, double mu,
                      bool regen_enabled) {
    if (!spec.from.finite() || !spec.to.finite())
        throw std::invalid_argument("segment_energy: non-finite coordinates");
    if (mu <= 0.0) throw std::invalid_argument("segment_energy: mu must be > 0");
    double s = distance(spec.from, spec.to);
    return leg_energy(mu * s, params.effective_mass(spec.payload), spec.v0, spec.vf,
                      params, regen_enabled);
}

double bid_energy_approx(const Vec2& robot_end, const Task& task, const RobotParams& params,
                         double mu, double v0, double vf) {
    double transit = clamped_leg_energy(mu * distance(robot_end, task.pickup),
                                        params.effective_mass(0.0), v0, vf, params);
    double execute = clamped_leg_energy(mu * distance(task.pickup, task.dropoff),
                                        params.effective_mass(task.payload), v0, vf, params);
    return transit + execute;
}

double bid_energy_zoned(const Vec2& robot_end, const Task& task, const RobotParams& params,
                        const FrictionField& field) {
    double transit = clamped_leg_energy(field.line_integral_mu(robot_end, task.pickup),
                                        params.effective_mass(0.0), 0.0, 0.0, params);
    double execute = clamped_leg_energy(field.line_integral_mu(task.pickup, task.dropoff),
                                        params.effective_mass(task.payload), 0.0, 0.0, params);
    return transit + execute;
}

double route_energy_closed_form(const Vec2& depot, const std::vector<Task>& sequence,
                                const RobotParams& params, const FrictionField& field,
                                bool regen_enabled, bool return_to_depot) {
    double total = 0.0;
    Vec2 at = depot;
    for (const auto& task : sequence) {
        total += leg_energy(field.line_integral_mu(at, task.pickup),
                            params.effective_mass(0.0), 0.0, 0.0, params, regen_enabled);
        total += leg_energy(field.line_integral_mu(task.pickup, task.dropoff),
                            params.effective_mass(task.payload), 0.0, 0.0, params,
                            regen_enabled);
        at = task.dropoff;
    }
    if (return_to_depot && !sequence.empty())
        total += leg_energy(field.line_integral_mu(at, depot), params.effective_mass(0.0),
                            0.0, 0.0, params, regen_enabled);
    return total;
}

std::vector<std::vector<double>> transition_matrix(const std::vector<Task>& tasks,
                                                   const PairCostFn& oracle) {
    std::size_t m = tasks.size();
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a[i][j] = oracle(tasks[i], tasks[j]);
    return a;
}

PairCostFn closed_form_pair_cost(const RobotParams& params, const FrictionField& field,
                                 bool regen_enabled) {
    return [params, field, regen_enabled](const Task& a, const Task& b) {
        double loaded = leg_energy(field.line_integral_mu(b.pickup, b.dropoff),
                                   params.effective_mass(b.payload), 0.0, 0.0, params,
                                   regen_enabled);
        if (a.id == b.id) return loaded;  // diagonal: loaded leg only
        double transit = leg_energy(field.line_integral_mu(a.dropoff, b.pickup),
                                    params.effective_mass(0.0), 0.0, 0.0, params,
                                    regen_enabled);
        return transit + loaded;
    };
}

}  // namespace fleet
