#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace evsim {

// Unit conversions. Config and report quantities use the declared engineering
// units (km/h, rpm, kW, kWh); internal physics runs in SI.
namespace units {

inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kJoulesPerKwh = 3.6e6;
// P[kW] = tau[N m] * n[rpm] / 9550
inline constexpr double kPowerTorqueSpeed = 9550.0;

constexpr double kmh_to_ms(double v_kmh) { return v_kmh / 3.6; }
constexpr double ms_to_kmh(double v_ms) { return v_ms * 3.6; }

constexpr double rpm_to_rad_s(double n_rpm) { return n_rpm * 2.0 * std::numbers::pi / 60.0; }
constexpr double rad_s_to_rpm(double w) { return w * 60.0 / (2.0 * std::numbers::pi); }

constexpr double kw_to_w(double p_kw) { return p_kw * 1000.0; }
constexpr double w_to_kw(double p_w) { return p_w / 1000.0; }

constexpr double kwh_to_j(double e_kwh) { return e_kwh * kJoulesPerKwh; }
constexpr double j_to_kwh(double e_j) { return e_j / kJoulesPerKwh; }

constexpr double km_to_m(double d_km) { return d_km * 1000.0; }
constexpr double m_to_km(double d_m) { return d_m / 1000.0; }

}  // namespace units

// Error hierarchy. Everything thrown by the library derives from evsim::Error.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct CycleError : Error {
    using Error::Error;
};

// Motor speed outside [0, max_speed].
struct EnvelopeError : Error {
    using Error::Error;
};

// Terminal voltage collapsed (below 1 V, or the requested power exceeds what
// the pack can deliver through its internal resistance).
struct DegenerateVoltageError : Error {
    using Error::Error;
};

struct UnreachableTargetError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace evsim
