#pragma once

// Motor envelope, motor/transmission power conversion and the Ah-counting
// battery.
//
// Sign conventions: positive torque, power and current mean propulsion
// (battery discharging); negative means generating (battery charging).
// Efficiencies always remove energy from whatever flows through them: a
// propelling motor draws P_mech / eta from the bus, a generating one
// delivers P_mech * eta.

#include <algorithm>
#include <cmath>
#include <string>

#include "evsim/units.hpp"
#include "evsim/vehicle_params.hpp"

namespace evsim {

struct BatteryState {
    double soc = 0.0;
    double terminal_voltage = 0.0;          // V
    double cumulative_energy_out = 0.0;     // kWh, integral of V*J over J > 0
    double cumulative_energy_regen = 0.0;   // kWh, integral of V*|J| over J < 0
    bool saturated = false;                 // soc was clamped to [0, 1] at some step

    static BatteryState initial(const BatteryParams& p) {
        return BatteryState{p.initial_soc, p.nominal_voltage, 0.0, 0.0, false};
    }
};

struct MotorOperatingPoint {
    double shaft_torque = 0.0;      // N m, negative = generating
    double speed = 0.0;             // rpm
    double electrical_power = 0.0;  // kW at the motor terminals, negative = generating
    double current = 0.0;           // A at the battery, negative = charging
};

/// Torque ceiling at a given motor speed: constant torque up to base speed,
/// constant power above it.
inline double available_torque(const MotorParams& motor, double speed_rpm) {
    if (!(speed_rpm >= 0.0) || speed_rpm > motor.max_speed)
        throw EnvelopeError("motor speed " + std::to_string(speed_rpm) + " rpm outside [0, " +
                            std::to_string(motor.max_speed) + "]");
    if (speed_rpm == 0.0) return motor.max_torque;
    return std::min(motor.max_torque, units::kPowerTorqueSpeed * motor.max_power / speed_rpm);
}

/// Electrical power [kW] for a shaft torque [N m] at speed [rpm].
inline double motor_electrical_power(double shaft_torque, double speed_rpm, double motor_efficiency) {
    const double mech = shaft_torque * speed_rpm / units::kPowerTorqueSpeed;
    if (shaft_torque > 0.0) return mech / motor_efficiency;
    if (shaft_torque < 0.0) return mech * motor_efficiency;
    return 0.0;
}

/// J = P / V with P in kW. Sign follows P.
inline double motor_current(double electrical_power_kw, double terminal_voltage) {
    if (!(terminal_voltage >= 1.0))
        throw DegenerateVoltageError("terminal voltage " + std::to_string(terminal_voltage) +
                                     " V below 1 V");
    return units::kw_to_w(electrical_power_kw) / terminal_voltage;
}

/// Terminal voltage that makes V * J = P hold together with V = Vn - Z*J,
/// i.e. the upper root of V^2 - Vn*V + Z*P = 0. Throws when P exceeds the
/// pack's maximum transferable power Vn^2 / (4 Z).
inline double loaded_terminal_voltage(double electrical_power_kw, const BatteryParams& p) {
    const double vn = p.nominal_voltage;
    const double z = p.internal_resistance;
    if (z == 0.0) return vn;
    const double disc = vn * vn - 4.0 * z * units::kw_to_w(electrical_power_kw);
    if (disc < 0.0)
        throw DegenerateVoltageError("battery cannot deliver " + std::to_string(electrical_power_kw) +
                                     " kW through " + std::to_string(z) + " Ohm");
    return 0.5 * (vn + std::sqrt(disc));
}

/// Transmission, motor side -> wheel side. Driving: tau*GR*eta. Generating:
/// the wheel supplies tau*GR/eta so the motor receives tau after losses.
inline double wheel_torque(double motor_torque, double gear_ratio, double transmission_efficiency) {
    if (motor_torque > 0.0) return motor_torque * gear_ratio * transmission_efficiency;
    if (motor_torque < 0.0) return motor_torque * gear_ratio / transmission_efficiency;
    return 0.0;
}

/// Inverse of wheel_torque.
inline double motor_torque_from_wheel(double wheel_torque_nm, double gear_ratio,
                                      double transmission_efficiency) {
    if (wheel_torque_nm > 0.0) return wheel_torque_nm / (gear_ratio * transmission_efficiency);
    if (wheel_torque_nm < 0.0) return wheel_torque_nm * transmission_efficiency / gear_ratio;
    return 0.0;
}

inline double motor_speed_from_vehicle(double v_kmh, double wheel_radius, double gear_ratio) {
    return units::rad_s_to_rpm(units::kmh_to_ms(v_kmh) / wheel_radius) * gear_ratio;
}

inline double vehicle_speed_from_motor(double n_rpm, double wheel_radius, double gear_ratio) {
    return units::ms_to_kmh(units::rpm_to_rad_s(n_rpm / gear_ratio) * wheel_radius);
}

/// One Ah-counting step. `current` in A (positive = discharge).
inline BatteryState battery_step(const BatteryState& state, double current, double dt,
                                 const BatteryParams& p) {
    const double capacity_ah = 1000.0 * p.capacity_energy / p.nominal_voltage;
    BatteryState next = state;
    double soc = state.soc -
                 p.coulombic_efficiency * current * dt / (units::kSecondsPerHour * capacity_ah);
    if (soc < 0.0 || soc > 1.0) {
        soc = std::clamp(soc, 0.0, 1.0);
        next.saturated = true;
    }
    next.soc = soc;
    next.terminal_voltage = p.nominal_voltage - p.internal_resistance * current;
    const double e_kwh = units::j_to_kwh(next.terminal_voltage * current * dt);
    if (current > 0.0) next.cumulative_energy_out += e_kwh;
    else if (current < 0.0) next.cumulative_energy_regen -= e_kwh;
    return next;
}

}  // namespace evsim
