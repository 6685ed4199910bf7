#pragma once

// Speed-tracking driver: a PI controller with a normalized output in [-1, 1]
// and the allocation of negative commands between regenerative and friction
// braking.

#include <algorithm>
#include <cmath>

#include "evsim/powertrain.hpp"
#include "evsim/vehicle_params.hpp"

namespace evsim {

struct DriverState {
    double integral = 0.0;      // accumulated speed error, km/h * s
    double last_command = 0.0;  // [-1, 1]
};

struct PiOutput {
    double command;
    DriverState state;
};

/// command = clamp(kp*dv + ki*(integral + dv*dt)) with dv = target - actual in
/// km/h. Conditional integration: the integral is frozen while the output is
/// saturated in the same direction as the error.
inline PiOutput pi_step(const DriverState& state, double target_kmh, double actual_kmh, double dt,
                        const DriverParams& params) {
    const double dv = target_kmh - actual_kmh;
    const double integral = state.integral + dv * dt;
    const double raw = params.kp * dv + params.ki * integral;
    const double command = std::clamp(raw, params.command_min, params.command_max);

    const bool wind_up = (raw > params.command_max && dv > 0.0) ||
                         (raw < params.command_min && dv < 0.0);
    return PiOutput{command, DriverState{wind_up ? state.integral : integral, command}};
}

struct ActuationRequest {
    double propulsion_torque = 0.0;  // N m at the motor shaft, >= 0
    double regen_torque = 0.0;       // N m at the motor shaft, >= 0 (magnitude)
    double friction_force = 0.0;     // N at the wheels, >= 0
};

/// Wheel force the motor can absorb as a generator at this motor speed.
inline double regen_capable_force(const VehicleConfig& c, double motor_speed_rpm) {
    if (motor_speed_rpm > c.motor.max_speed) return 0.0;
    const double tau = available_torque(c.motor, motor_speed_rpm);
    return -wheel_torque(-tau, c.drivetrain.gear_ratio, c.drivetrain.transmission_efficiency) /
           c.body.wheel_radius;
}

/// Turns a command into actuator requests.
///
/// Positive commands scale the available motor torque. Negative commands ask
/// for |command| of the combined braking capacity (friction cap plus what the
/// motor can absorb). Regeneration takes as much of that as it can, friction
/// covers the rest. Regeneration is off below the cutoff speed or when
/// `regen_allowed` is false. Above the motor's speed limit no motor torque is
/// requested in either direction.
inline ActuationRequest split_command(double command, double motor_speed_rpm, double vehicle_speed_kmh,
                                      const VehicleConfig& c, bool regen_allowed = true) {
    ActuationRequest req;
    const bool over_speed = motor_speed_rpm > c.motor.max_speed;
    if (command > 0.0) {
        if (!over_speed) req.propulsion_torque = command * available_torque(c.motor, motor_speed_rpm);
        return req;
    }
    if (command == 0.0) return req;

    const auto& d = c.drivetrain;
    const bool regen_on = regen_allowed && !over_speed && vehicle_speed_kmh >= d.regen_cutoff_speed &&
                          vehicle_speed_kmh > 0.0;
    const double regen_cap = regen_on ? regen_capable_force(c, motor_speed_rpm) : 0.0;
    const double demand = std::abs(command) * (d.max_friction_brake_force + regen_cap);
    const double regen_force = std::min(demand, regen_cap);
    req.friction_force = std::min(demand - regen_force, d.max_friction_brake_force);
    if (regen_force > 0.0) {
        req.regen_torque = -motor_torque_from_wheel(-regen_force * c.body.wheel_radius, d.gear_ratio,
                                                    d.transmission_efficiency);
    }
    return req;
}

}  // namespace evsim
