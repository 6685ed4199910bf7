#pragma once

// Longitudinal body model: road-load forces, Newton's law along the path and
// the semi-implicit Euler update of speed and distance.
//
// Speeds are km/h at the interfaces (the road-load formulas are written for
// km/h); accelerations are m/s^2; forces are N.

#include <algorithm>
#include <cmath>

#include "evsim/units.hpp"
#include "evsim/vehicle_params.hpp"

namespace evsim {

struct BodyState {
    double speed = 0.0;         // km/h
    double distance = 0.0;      // km
    double acceleration = 0.0;  // m/s^2, last step
};

/// All entries except `net` are non-negative magnitudes; their signs are
/// fixed by `make`.
struct ForceBreakdown {
    double propulsion = 0.0;
    double regen_brake = 0.0;
    double friction_brake = 0.0;
    double rolling = 0.0;
    double aero = 0.0;
    double net = 0.0;

    static ForceBreakdown make(double propulsion, double regen, double friction, double rolling,
                               double aero) {
        return ForceBreakdown{propulsion, regen,   friction, rolling, aero,
                              propulsion - regen - friction - rolling - aero};
    }
};

/// m g (f0 + f1 v/100 + f4 (v/100)^4), v in km/h.
inline double rolling_resistance(const VehicleBodyParams& body, double v_kmh) {
    const double x = v_kmh / 100.0;
    return body.mass * body.gravity * (body.f0 + body.f1 * x + body.f4 * x * x * x * x);
}

/// Cd A v^2 / 21.15, v in km/h.
inline double aero_drag(const VehicleBodyParams& body, double v_kmh) {
    return body.drag_coefficient * body.frontal_area * v_kmh * v_kmh / 21.15;
}

inline double acceleration(const ForceBreakdown& forces, double mass) { return forces.net / mass; }

/// v' = max(0, v + a dt), then s' = s + v' dt.
inline BodyState integrate(const BodyState& state, double accel, double dt) {
    BodyState next;
    next.speed = std::max(0.0, state.speed + units::ms_to_kmh(accel * dt));
    next.distance = state.distance + units::m_to_km(units::kmh_to_ms(next.speed) * dt);
    next.acceleration = accel;
    return next;
}

/// Assembles the forces acting during one step from speed `v_kmh`.
///
/// At standstill the vehicle only moves off when the propulsion force beats
/// static rolling resistance; otherwise every force reports zero. On the
/// breakaway step resistances are still zero (they act from v > 0 on).
///
/// When braking plus resistance would reverse the vehicle within the step,
/// the opposing forces are trimmed (friction first, then regen, rolling,
/// aero) so that the step ends exactly at rest. The trimmed breakdown is what
/// the energy accounting sees.
inline ForceBreakdown resolve_forces(double propulsion, double regen, double friction,
                                     const VehicleBodyParams& body, double v_kmh, double dt) {
    if (v_kmh <= 0.0) {
        if (propulsion <= rolling_resistance(body, 0.0)) return ForceBreakdown{};
        return ForceBreakdown::make(propulsion, 0.0, 0.0, 0.0, 0.0);
    }
    auto f = ForceBreakdown::make(propulsion, regen, friction, rolling_resistance(body, v_kmh),
                                  aero_drag(body, v_kmh));
    const double v_ms = units::kmh_to_ms(v_kmh);
    const double stop_net = -body.mass * v_ms / dt;
    if (f.net >= stop_net) return f;

    double excess = stop_net - f.net;
    for (double* term : {&f.friction_brake, &f.regen_brake, &f.rolling, &f.aero}) {
        const double cut = std::min(*term, excess);
        *term -= cut;
        excess -= cut;
    }
    return ForceBreakdown::make(f.propulsion, f.regen_brake, f.friction_brake, f.rolling, f.aero);
}

}  // namespace evsim
