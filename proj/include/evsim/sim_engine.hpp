#pragma once

// Fixed-step closed-loop simulation: driver -> motor -> transmission -> body,
// with the battery fed by the motor's electrical demand.
//
// Execution order inside one step of length dt, starting at t_k = k*dt:
//   1. target speed at t_{k+1}
//   2. PI driver on (target, speed at t_k)
//   3. command split into propulsion / regen / friction requests
//   4. motor envelope at the start-of-step motor speed, wheel forces
//   5. road loads at the start-of-step speed
//   6. acceleration and semi-implicit Euler update of speed and distance
//   7. motor electrical power -> pack current -> battery update
//   8. energy ledger
//   9. trace record (values at t_{k+1})
//
// The driver therefore reacts to the speed one step old. Motor power for the
// battery is evaluated at the step's mean speed, so the wheel work booked in
// the ledger equals the kinetic energy change plus road and brake losses to
// rounding.
//
// Regenerated energy is booked into the pack only when regen is enabled. With
// it disabled the motor still brakes (the allocation does not change), and
// the generated energy is dissipated, so the vehicle motion is identical to a
// run with regen_efficiency = 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evsim/drive_cycle.hpp"
#include "evsim/driver_control.hpp"
#include "evsim/longitudinal_dynamics.hpp"
#include "evsim/powertrain.hpp"
#include "evsim/units.hpp"
#include "evsim/vehicle_params.hpp"

namespace evsim {

/// Energy bookkeeping for a run, all in kWh.
///
/// battery_out / battery_regen_in are chemical energy (nominal voltage times
/// charge moved); the pack's internal I^2 R heating is booked separately as
/// resistive_internal_loss. drivetrain_loss covers motor and transmission
/// losses plus regenerated energy that never reaches the pack.
struct EnergyLedger {
    double battery_out = 0.0;
    double battery_regen_in = 0.0;
    double kinetic_delta = 0.0;
    double rolling_loss = 0.0;
    double aero_loss = 0.0;
    double friction_brake_loss = 0.0;
    double drivetrain_loss = 0.0;
    double resistive_internal_loss = 0.0;

    double residual() const {
        return battery_out - battery_regen_in -
               (kinetic_delta + rolling_loss + aero_loss + friction_brake_loss + drivetrain_loss +
                resistive_internal_loss);
    }
};

struct LedgerCheck {
    bool pass;
    double residual_kwh;
    double residual_fraction;  // |residual| / battery_out, 0 when battery_out ~ 0
};

/// Passes when |residual| <= 0.5% of battery_out, or <= 1e-6 kWh when the
/// battery delivered (almost) nothing.
inline LedgerCheck ledger_check(const EnergyLedger& ledger) {
    constexpr double kRelTol = 0.005;
    constexpr double kAbsTol = 1e-6;
    const double r = ledger.residual();
    if (std::abs(ledger.battery_out) <= kAbsTol) return {std::abs(r) <= kAbsTol, r, 0.0};
    const double frac = std::abs(r) / ledger.battery_out;
    return {frac <= kRelTol, r, frac};
}

struct SimState {
    std::int64_t step_index = 0;
    double t = 0.0;  // s, always step_index * dt
    BodyState body;
    BatteryState battery;
    DriverState driver;
    ForceBreakdown last_forces;
    MotorOperatingPoint last_motor;
    EnergyLedger ledger;

    static SimState initial(const VehicleConfig& c) {
        SimState s;
        s.battery = BatteryState::initial(c.battery);
        return s;
    }
};

struct TraceRecord {
    double t = 0.0;               // s
    double v_target = 0.0;        // km/h
    double v = 0.0;               // km/h
    double distance = 0.0;        // km
    double command = 0.0;         // [-1, 1]
    double motor_torque = 0.0;    // N m, signed
    double motor_speed = 0.0;     // rpm, start of step
    double friction_force = 0.0;  // N
    double battery_power = 0.0;   // kW at the terminals, signed
    double current = 0.0;         // A, signed
    double voltage = 0.0;         // V
    double soc = 0.0;
    double rolling = 0.0;         // N
    double aero = 0.0;            // N
    double accel = 0.0;           // m/s^2

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using SimTrace = std::vector<TraceRecord>;

enum class StopReason { cycle_end, soc_floor, max_time };

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::cycle_end: return "cycle_end";
        case StopReason::soc_floor: return "soc_floor";
        case StopReason::max_time: return "max_time";
    }
    return "unknown";
}

struct SimSummary {
    double duration = 0.0;            // s
    double distance = 0.0;            // km
    double soc_start = 0.0;
    double soc_end = 0.0;
    double max_tracking_error = 0.0;  // km/h
    double max_tracking_error_pct = 0.0;  // % of the cycle's max speed
    double energy_out = 0.0;          // kWh at the terminals
    double energy_regen = 0.0;        // kWh at the terminals
    std::int64_t cycles_completed = 0;
    StopReason stop_reason = StopReason::cycle_end;
};

struct StepOptions {
    bool regen_enabled = true;
    bool repeat_cycle = false;
    // Bypasses the driver, e.g. 1.0 for full-throttle runs.
    std::optional<double> fixed_command;
};

/// Target speed seen by the controller at absolute time t.
inline double cycle_target_at(const DriveCycle& cycle, double t, bool repeat_cycle) {
    if (!repeat_cycle) return cycle.target_speed(t);
    const double dur = cycle.duration();
    const double k = std::floor(t / dur);
    return cycle.target_speed(t - k * dur);
}

struct StepResult {
    SimState state;
    TraceRecord record;
};

inline StepResult step(const SimState& state, const DriveCycle& cycle, const VehicleConfig& c,
                       const StepOptions& opts) {
    const double dt = c.sim.dt;
    const auto& body = c.body;
    const auto& drv = c.drivetrain;
    const double v0 = state.body.speed;

    SimState next = state;
    next.step_index = state.step_index + 1;
    next.t = static_cast<double>(next.step_index) * dt;

    // 1-2
    const double target = cycle_target_at(cycle, next.t, opts.repeat_cycle);
    double command = 0.0;
    if (opts.fixed_command) {
        command = std::clamp(*opts.fixed_command, -1.0, 1.0);
        next.driver.last_command = command;
    } else {
        auto pi = pi_step(state.driver, target, v0, dt, c.driver);
        command = pi.command;
        next.driver = pi.state;
    }

    // 3-4
    const double n0 = motor_speed_from_vehicle(v0, body.wheel_radius, drv.gear_ratio);
    const auto req = split_command(command, n0, v0, c);
    const double f_prop =
        wheel_torque(req.propulsion_torque, drv.gear_ratio, drv.transmission_efficiency) / body.wheel_radius;
    const double f_regen =
        -wheel_torque(-req.regen_torque, drv.gear_ratio, drv.transmission_efficiency) / body.wheel_radius;

    // 5-6
    const auto forces = resolve_forces(f_prop, f_regen, req.friction_force, body, v0, dt);
    const double accel = acceleration(forces, body.mass);
    next.body = integrate(state.body, accel, dt);
    next.last_forces = forces;
    const double v1 = next.body.speed;

    // 7
    const double v_mean = 0.5 * (v0 + v1);
    const double n_mean = motor_speed_from_vehicle(v_mean, body.wheel_radius, drv.gear_ratio);
    double shaft_torque = 0.0;
    if (forces.propulsion > 0.0) {
        shaft_torque = req.propulsion_torque;
    } else if (forces.regen_brake > 0.0) {
        shaft_torque = motor_torque_from_wheel(-forces.regen_brake * body.wheel_radius, drv.gear_ratio,
                                               drv.transmission_efficiency);
    }
    const double p_motor = motor_electrical_power(shaft_torque, n_mean, c.motor.efficiency);
    // Regeneration efficiency is end to end: pack energy recovered per unit of
    // mechanical braking work absorbed at the wheels, never more than the
    // motor actually generates.
    double p_batt = p_motor;
    if (p_motor < 0.0) {
        const double wheel_kw = units::w_to_kw(forces.regen_brake * units::kmh_to_ms(v_mean));
        p_batt = opts.regen_enabled ? std::max(-drv.regen_efficiency * wheel_kw, p_motor) : 0.0;
    }

    double current = 0.0;
    if (p_batt != 0.0) current = motor_current(p_batt, loaded_terminal_voltage(p_batt, c.battery));
    next.battery = battery_step(state.battery, current, dt, c.battery);
    next.last_motor = MotorOperatingPoint{shaft_torque, n0, p_motor, current};

    // 8
    {
        auto& L = next.ledger;
        const double ds = units::kmh_to_ms(v_mean) * dt;  // m
        const double w_prop = forces.propulsion * ds;
        const double w_regen = forces.regen_brake * ds;
        const double e_batt = units::kw_to_w(p_batt) * dt;  // J at the terminals, signed
        const double vn = c.battery.nominal_voltage;
        const double v0_ms = units::kmh_to_ms(v0);
        const double v1_ms = units::kmh_to_ms(v1);

        L.kinetic_delta += units::j_to_kwh(0.5 * body.mass * (v1_ms * v1_ms - v0_ms * v0_ms));
        L.rolling_loss += units::j_to_kwh(forces.rolling * ds);
        L.aero_loss += units::j_to_kwh(forces.aero * ds);
        L.friction_brake_loss += units::j_to_kwh(forces.friction_brake * ds);
        if (shaft_torque > 0.0) L.drivetrain_loss += units::j_to_kwh(e_batt - w_prop);
        else if (shaft_torque < 0.0) L.drivetrain_loss += units::j_to_kwh(w_regen + e_batt);
        L.resistive_internal_loss +=
            units::j_to_kwh(c.battery.internal_resistance * current * current * dt);
        if (current > 0.0) L.battery_out += units::j_to_kwh(vn * current * dt);
        else if (current < 0.0) L.battery_regen_in += units::j_to_kwh(-vn * current * dt);
    }

    // 9
    TraceRecord rec;
    rec.t = next.t;
    rec.v_target = target;
    rec.v = v1;
    rec.distance = next.body.distance;
    rec.command = command;
    rec.motor_torque = shaft_torque;
    rec.motor_speed = n0;
    rec.friction_force = forces.friction_brake;
    rec.battery_power = units::w_to_kw(next.battery.terminal_voltage * current);
    rec.current = current;
    rec.voltage = next.battery.terminal_voltage;
    rec.soc = next.battery.soc;
    rec.rolling = forces.rolling;
    rec.aero = forces.aero;
    rec.accel = accel;
    return {std::move(next), rec};
}

inline StepResult step(const SimState& state, const DriveCycle& cycle, const VehicleConfig& c,
                       bool regen_enabled) {
    StepOptions opts;
    opts.regen_enabled = regen_enabled;
    return step(state, cycle, c, opts);
}

struct RunOptions {
    bool regen_enabled = true;
    // Loop the cycle until another stop condition fires.
    bool repeat_cycle = false;
    std::optional<double> stop_at_soc;
    // Defaults to config.sim.max_sim_time.
    std::optional<double> max_time;
    std::optional<double> fixed_command;
};

struct RunOutcome {
    SimSummary summary;
    EnergyLedger ledger;
    SimState final_state;
};

/// Runs to the first stop condition, handing every record to `sink`.
/// Priority when several conditions hold at once: soc_floor, max_time,
/// cycle_end.
template <typename Sink>
RunOutcome run_with(const VehicleConfig& config, const DriveCycle& cycle, const RunOptions& options,
                    Sink&& sink) {
    const double dt = config.sim.dt;
    const double max_time = options.max_time.value_or(config.sim.max_sim_time);
    const double duration = cycle.duration();
    const double cycle_vmax = cycle_stats(cycle).max_speed;
    const StepOptions step_opts{options.regen_enabled, options.repeat_cycle, options.fixed_command};
    // Tolerates dt not dividing the horizon exactly in binary.
    constexpr double kTimeEps = 1e-9;

    SimState state = SimState::initial(config);
    SimSummary summary;
    summary.soc_start = state.battery.soc;

    StopReason reason = StopReason::cycle_end;
    for (;;) {
        if (options.stop_at_soc && state.battery.soc <= *options.stop_at_soc) {
            reason = StopReason::soc_floor;
            break;
        }
        const double t_next = static_cast<double>(state.step_index + 1) * dt;
        if (t_next > max_time + kTimeEps) {
            reason = StopReason::max_time;
            break;
        }
        if (!options.repeat_cycle && t_next > duration + kTimeEps) {
            reason = StopReason::cycle_end;
            break;
        }
        auto [next, rec] = step(state, cycle, config, step_opts);
        summary.max_tracking_error = std::max(summary.max_tracking_error, std::abs(rec.v - rec.v_target));
        state = std::move(next);
        sink(static_cast<const TraceRecord&>(rec));
    }

    summary.stop_reason = reason;
    summary.duration = state.t;
    summary.distance = state.body.distance;
    summary.soc_end = state.battery.soc;
    summary.max_tracking_error_pct =
        cycle_vmax > 0.0 ? 100.0 * summary.max_tracking_error / cycle_vmax : 0.0;
    summary.energy_out = state.battery.cumulative_energy_out;
    summary.energy_regen = state.battery.cumulative_energy_regen;
    summary.cycles_completed = static_cast<std::int64_t>(std::floor(state.t / duration + kTimeEps));
    return RunOutcome{summary, state.ledger, std::move(state)};
}

struct RunResult {
    SimTrace trace;
    SimSummary summary;
    EnergyLedger ledger;
};

inline RunResult run(const VehicleConfig& config, const DriveCycle& cycle, const RunOptions& options = {}) {
    RunResult out;
    auto outcome = run_with(config, cycle, options, [&](const TraceRecord& r) { out.trace.push_back(r); });
    out.summary = outcome.summary;
    out.ledger = outcome.ledger;
    return out;
}

}  // namespace evsim
