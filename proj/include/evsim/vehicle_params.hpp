#pragma once

// Vehicle, motor, battery, drivetrain, driver and solver parameters.
//
// Field units are the ones the config file uses:
//   body        mass [kg], wheel_radius [m], frontal_area [m^2], gravity [m/s^2]
//   motor       torques [N m], powers [kW], speeds [rpm]
//   battery     capacity_energy [kWh], nominal_voltage [V], internal_resistance [Ohm]
//   drivetrain  max_friction_brake_force [N], regen_cutoff_speed [km/h]
//   driver      kp [1/(km/h)], ki [1/(km/h s)]
//   sim         dt [s], max_sim_time [s]
//
// Defaults reproduce the reference vehicle (1549 kg, 30/75 kW motor,
// 216 kWh pack). Gear ratio, motor efficiency, pack voltage and resistance,
// coulombic efficiency, driver gains, dt and regen cutoff are not part of the
// reference data set; their defaults are engineering choices and are marked
// as such below.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evsim/units.hpp"

namespace evsim {

struct VehicleBodyParams {
    double mass = 1549.0;
    double wheel_radius = 0.284;
    double frontal_area = 1.87;
    double drag_coefficient = 0.42;
    double f0 = 0.021;
    double f1 = 0.0;
    double f4 = 0.0;
    double gravity = 9.81;
};

struct MotorParams {
    double rated_torque = 95.5;
    double max_torque = 230.0;
    double rated_power = 30.0;
    double max_power = 75.0;
    double rated_speed = 3000.0;
    double max_speed = 8000.0;
    double efficiency = 0.90;  // not reference data
};

struct BatteryParams {
    double capacity_energy = 216.0;
    double nominal_voltage = 350.0;     // not reference data
    double internal_resistance = 0.1;   // not reference data
    double coulombic_efficiency = 1.0;  // not reference data
    double initial_soc = 0.9;
    double soc_floor = 0.1;
};

struct DrivetrainParams {
    // 8000 rpm at the motor maps to ~178 km/h at the wheels.
    double gear_ratio = 4.8;  // not reference data
    double transmission_efficiency = 0.9;
    // Cap of the friction brakes alone; regenerative force comes on top.
    double max_friction_brake_force = 800.0;
    // Pack energy recovered per unit of braking work absorbed at the wheels.
    double regen_efficiency = 0.5;
    // Below this the friction brakes work alone. Not reference data; kept low
    // because 800 N of friction cannot follow the cycle's final braking to a
    // stop.
    double regen_cutoff_speed = 2.0;
};

struct DriverParams {
    // Not reference data; tuned for UDDS tracking at dt 0.1 and 0.01.
    double kp = 1.0;
    double ki = 0.5;
    double command_min = -1.0;
    double command_max = 1.0;
};

struct SimParams {
    double dt = 0.1;
    double max_sim_time = 1.0e6;
};

struct VehicleConfig {
    VehicleBodyParams body;
    MotorParams motor;
    BatteryParams battery;
    DrivetrainParams drivetrain;
    DriverParams driver;
    SimParams sim;
};

struct Violation {
    std::string field;       // dotted path, e.g. "body.mass"
    std::string constraint;  // human readable, e.g. "mass > 0"

    std::string to_string() const { return field + ": " + constraint; }
};

/// Quantities that follow from a config and are used throughout the model.
struct DerivedParams {
    double battery_capacity_ah;      // Cb
    double base_speed_rpm;           // end of the constant-torque region
    double motor_rpm_per_kmh;        // wheel speed -> motor speed factor
    double standstill_wheel_force;   // N, full torque through the transmission
};

/// Returns every violated invariant; empty means valid.
inline std::vector<Violation> validate(const VehicleConfig& c) {
    std::vector<Violation> out;
    auto require = [&](bool ok, const char* field, const char* constraint) {
        if (!ok) out.push_back({field, constraint});
    };
    auto finite = [](double x) { return std::isfinite(x); };

    const auto& b = c.body;
    require(finite(b.mass) && b.mass > 0, "body.mass", "mass > 0");
    require(finite(b.wheel_radius) && b.wheel_radius > 0, "body.wheel_radius", "wheel_radius > 0");
    require(finite(b.frontal_area) && b.frontal_area > 0, "body.frontal_area", "frontal_area > 0");
    require(finite(b.drag_coefficient) && b.drag_coefficient > 0, "body.drag_coefficient",
            "drag_coefficient > 0");
    require(finite(b.f0) && b.f0 >= 0, "body.f0", "f0 ≥ 0");
    require(finite(b.f1) && b.f1 >= 0, "body.f1", "f1 ≥ 0");
    require(finite(b.f4) && b.f4 >= 0, "body.f4", "f4 ≥ 0");
    require(finite(b.gravity) && b.gravity > 0, "body.gravity", "gravity > 0");

    const auto& m = c.motor;
    require(finite(m.rated_torque) && m.rated_torque > 0, "motor.rated_torque", "rated_torque > 0");
    require(m.rated_torque <= m.max_torque, "motor.rated_torque", "rated_torque ≤ max_torque");
    require(finite(m.rated_power) && m.rated_power > 0, "motor.rated_power", "rated_power > 0");
    require(m.rated_power <= m.max_power, "motor.rated_power", "rated_power ≤ max_power");
    require(finite(m.rated_speed) && m.rated_speed > 0, "motor.rated_speed", "rated_speed > 0");
    require(m.rated_speed <= m.max_speed, "motor.rated_speed", "rated_speed ≤ max_speed");
    require(finite(m.max_torque) && finite(m.max_power) && finite(m.max_speed), "motor",
            "limits finite");
    if (m.rated_power > 0) {
        const double implied = m.rated_torque * m.rated_speed / units::kPowerTorqueSpeed;
        require(std::abs(implied - m.rated_power) <= 0.01 * m.rated_power, "motor.rated_power",
                "rated_torque × rated_speed / 9550 = rated_power within 1%");
    }
    require(finite(m.efficiency) && m.efficiency > 0 && m.efficiency <= 1, "motor.efficiency",
            "0 < efficiency ≤ 1");

    const auto& bat = c.battery;
    require(finite(bat.capacity_energy) && bat.capacity_energy > 0, "battery.capacity_energy",
            "capacity_energy > 0");
    require(finite(bat.nominal_voltage) && bat.nominal_voltage > 0, "battery.nominal_voltage",
            "nominal_voltage > 0");
    require(finite(bat.internal_resistance) && bat.internal_resistance >= 0,
            "battery.internal_resistance", "internal_resistance ≥ 0");
    require(finite(bat.coulombic_efficiency) && bat.coulombic_efficiency > 0 &&
                bat.coulombic_efficiency <= 1,
            "battery.coulombic_efficiency", "0 < coulombic_efficiency ≤ 1");
    require(bat.soc_floor >= 0, "battery.soc_floor", "soc_floor ≥ 0");
    require(bat.soc_floor < bat.initial_soc, "battery.soc_floor", "soc_floor < initial_soc");
    require(bat.initial_soc <= 1, "battery.initial_soc", "initial_soc ≤ 1");

    const auto& d = c.drivetrain;
    require(finite(d.gear_ratio) && d.gear_ratio > 0, "drivetrain.gear_ratio", "gear_ratio > 0");
    require(finite(d.transmission_efficiency) && d.transmission_efficiency > 0 &&
                d.transmission_efficiency <= 1,
            "drivetrain.transmission_efficiency", "0 < transmission_efficiency ≤ 1");
    require(finite(d.max_friction_brake_force) && d.max_friction_brake_force >= 0,
            "drivetrain.max_friction_brake_force", "max_friction_brake_force ≥ 0");
    require(finite(d.regen_efficiency) && d.regen_efficiency >= 0 && d.regen_efficiency <= 1,
            "drivetrain.regen_efficiency", "0 ≤ regen_efficiency ≤ 1");
    require(finite(d.regen_cutoff_speed) && d.regen_cutoff_speed >= 0,
            "drivetrain.regen_cutoff_speed", "regen_cutoff_speed ≥ 0");

    const auto& drv = c.driver;
    require(finite(drv.kp) && drv.kp >= 0, "driver.kp", "kp ≥ 0");
    require(finite(drv.ki) && drv.ki >= 0, "driver.ki", "ki ≥ 0");
    require(drv.command_min == -1.0, "driver.command_min", "command_min = -1");
    require(drv.command_max == 1.0, "driver.command_max", "command_max = +1");

    require(finite(c.sim.dt) && c.sim.dt > 0 && c.sim.dt <= 1, "sim.dt", "0 < dt ≤ 1");
    require(finite(c.sim.max_sim_time) && c.sim.max_sim_time > 0, "sim.max_sim_time",
            "max_sim_time > 0");
    return out;
}

inline DerivedParams derived_quantities(const VehicleConfig& c) {
    const double gr = c.drivetrain.gear_ratio;
    const double rw = c.body.wheel_radius;
    return DerivedParams{
        .battery_capacity_ah = 1000.0 * c.battery.capacity_energy / c.battery.nominal_voltage,
        .base_speed_rpm = units::kPowerTorqueSpeed * c.motor.max_power / c.motor.max_torque,
        .motor_rpm_per_kmh = units::rad_s_to_rpm(units::kmh_to_ms(1.0) / rw) * gr,
        .standstill_wheel_force = c.motor.max_torque * gr * c.drivetrain.transmission_efficiency / rw,
    };
}

// ---------------------------------------------------------------------------
// SI view of a config. Only unit-bearing fields change; dimensionless ones
// are carried through untouched.

struct VehicleConfigSI {
    VehicleConfig raw;             // dimensionless fields read from here
    double max_power_w;
    double rated_power_w;
    double max_speed_rad_s;
    double rated_speed_rad_s;
    double capacity_j;
    double regen_cutoff_ms;
};

inline VehicleConfigSI to_si(const VehicleConfig& c) {
    return VehicleConfigSI{
        .raw = c,
        .max_power_w = units::kw_to_w(c.motor.max_power),
        .rated_power_w = units::kw_to_w(c.motor.rated_power),
        .max_speed_rad_s = units::rpm_to_rad_s(c.motor.max_speed),
        .rated_speed_rad_s = units::rpm_to_rad_s(c.motor.rated_speed),
        .capacity_j = units::kwh_to_j(c.battery.capacity_energy),
        .regen_cutoff_ms = units::kmh_to_ms(c.drivetrain.regen_cutoff_speed),
    };
}

inline VehicleConfig from_si(const VehicleConfigSI& s) {
    VehicleConfig c = s.raw;
    c.motor.max_power = units::w_to_kw(s.max_power_w);
    c.motor.rated_power = units::w_to_kw(s.rated_power_w);
    c.motor.max_speed = units::rad_s_to_rpm(s.max_speed_rad_s);
    c.motor.rated_speed = units::rad_s_to_rpm(s.rated_speed_rad_s);
    c.battery.capacity_energy = units::j_to_kwh(s.capacity_j);
    c.drivetrain.regen_cutoff_speed = units::ms_to_kmh(s.regen_cutoff_ms);
    return c;
}

// ---------------------------------------------------------------------------
// JSON document <-> VehicleConfig

namespace detail {

struct FieldRef {
    const char* name;
    double* value;
};

template <typename Fn>
void for_each_section(VehicleConfig& c, Fn&& fn) {
    auto& b = c.body;
    fn("body", std::vector<FieldRef>{{"mass", &b.mass},
                                     {"wheel_radius", &b.wheel_radius},
                                     {"frontal_area", &b.frontal_area},
                                     {"drag_coefficient", &b.drag_coefficient},
                                     {"f0", &b.f0},
                                     {"f1", &b.f1},
                                     {"f4", &b.f4},
                                     {"gravity", &b.gravity}});
    auto& m = c.motor;
    fn("motor", std::vector<FieldRef>{{"rated_torque", &m.rated_torque},
                                      {"max_torque", &m.max_torque},
                                      {"rated_power", &m.rated_power},
                                      {"max_power", &m.max_power},
                                      {"rated_speed", &m.rated_speed},
                                      {"max_speed", &m.max_speed},
                                      {"efficiency", &m.efficiency}});
    auto& bat = c.battery;
    fn("battery", std::vector<FieldRef>{{"capacity_energy", &bat.capacity_energy},
                                        {"nominal_voltage", &bat.nominal_voltage},
                                        {"internal_resistance", &bat.internal_resistance},
                                        {"coulombic_efficiency", &bat.coulombic_efficiency},
                                        {"initial_soc", &bat.initial_soc},
                                        {"soc_floor", &bat.soc_floor}});
    auto& d = c.drivetrain;
    fn("drivetrain",
       std::vector<FieldRef>{{"gear_ratio", &d.gear_ratio},
                             {"transmission_efficiency", &d.transmission_efficiency},
                             {"max_friction_brake_force", &d.max_friction_brake_force},
                             {"regen_efficiency", &d.regen_efficiency},
                             {"regen_cutoff_speed", &d.regen_cutoff_speed}});
    auto& drv = c.driver;
    fn("driver", std::vector<FieldRef>{{"kp", &drv.kp},
                                       {"ki", &drv.ki},
                                       {"command_min", &drv.command_min},
                                       {"command_max", &drv.command_max}});
    fn("sim", std::vector<FieldRef>{{"dt", &c.sim.dt}, {"max_sim_time", &c.sim.max_sim_time}});
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const VehicleConfig& config) {
    VehicleConfig c = config;
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    detail::for_each_section(c, [&](const char* section, const std::vector<detail::FieldRef>& fields) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (const auto& f : fields) obj[f.name] = *f.value;
        doc[section] = std::move(obj);
    });
    return doc;
}

inline std::string serialize(const VehicleConfig& c) { return to_json(c).dump(2) + "\n"; }

/// Parses and validates a config document. Absent fields keep their defaults;
/// unknown keys are rejected.
inline VehicleConfig parse_config(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config parse error: top level must be an object");

    VehicleConfig c;
    std::vector<std::string> known_sections;
    detail::for_each_section(c, [&](const char* section, const std::vector<detail::FieldRef>& fields) {
        known_sections.emplace_back(section);
        auto it = doc.find(section);
        if (it == doc.end()) return;
        if (!it->is_object())
            throw ConfigError(std::string("config error: '") + section + "' must be an object");
        for (const auto& [key, value] : it->items()) {
            auto f = std::find_if(fields.begin(), fields.end(),
                                  [&](const detail::FieldRef& r) { return key == r.name; });
            if (f == fields.end())
                throw ConfigError("config error: unknown key '" + std::string(section) + "." + key + "'");
            if (value.is_null()) continue;  // explicit null means "use default"
            if (!value.is_number())
                throw ConfigError("config error: '" + std::string(section) + "." + key +
                                  "' must be a number");
            *f->value = value.get<double>();
        }
    });
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known_sections.begin(), known_sections.end(), key) == known_sections.end())
            throw ConfigError("config error: unknown key '" + key + "'");
    }

    auto violations = validate(c);
    if (!violations.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& v : violations) msg += "\n  " + v.to_string();
        throw ConfigError(msg);
    }
    return c;
}

inline VehicleConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace evsim
