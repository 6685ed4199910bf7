#pragma once

// Scripted evaluation scenarios: range with and without regeneration,
// full-throttle acceleration and top speed, motor sizing from road load, and
// SoC dynamics over a trace.

#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <string>
#include <vector>

#include "evsim/drive_cycle.hpp"
#include "evsim/longitudinal_dynamics.hpp"
#include "evsim/powertrain.hpp"
#include "evsim/sim_engine.hpp"
#include "evsim/vehicle_params.hpp"

namespace evsim {

// ---------------------------------------------------------------------------
// Range

struct ProfilePoint {
    double t;         // s
    double distance;  // km
    double soc;
};

struct RangeReport {
    double distance_km = 0.0;
    std::int64_t cycles_completed = 0;
    double soc_start = 0.0;
    double soc_end = 0.0;
    double energy_out_kwh = 0.0;
    double energy_regen_kwh = 0.0;
    bool regen_enabled = true;
    double duration_s = 0.0;
    StopReason stop_reason = StopReason::soc_floor;
    EnergyLedger ledger;
    std::vector<ProfilePoint> profile;  // decimated distance / SoC history
};

/// Repeats `cycle` until the SoC reaches `soc_floor` (or the config's
/// max_sim_time runs out). `profile_interval_s` controls the decimation of
/// the returned distance/SoC history.
inline RangeReport range_test(const VehicleConfig& config, const DriveCycle& cycle, bool regen_enabled,
                              double soc_floor, double profile_interval_s = 60.0) {
    if (!(config.battery.initial_soc > soc_floor))
        throw ConfigError("range_test: initial_soc must exceed the SoC floor");
    RunOptions opts;
    opts.regen_enabled = regen_enabled;
    opts.repeat_cycle = true;
    opts.stop_at_soc = soc_floor;

    RangeReport rep;
    rep.regen_enabled = regen_enabled;
    rep.profile.push_back({0.0, 0.0, config.battery.initial_soc});
    const auto stride = std::max<std::int64_t>(1, std::llround(profile_interval_s / config.sim.dt));
    std::int64_t n = 0;
    TraceRecord last{};
    auto outcome = run_with(config, cycle, opts, [&](const TraceRecord& r) {
        last = r;
        if (++n % stride == 0) rep.profile.push_back({r.t, r.distance, r.soc});
    });
    if (n % stride != 0) rep.profile.push_back({last.t, last.distance, last.soc});

    const auto& s = outcome.summary;
    rep.distance_km = s.distance;
    rep.cycles_completed = s.cycles_completed;
    rep.soc_start = s.soc_start;
    rep.soc_end = s.soc_end;
    rep.energy_out_kwh = s.energy_out;
    rep.energy_regen_kwh = s.energy_regen;
    rep.duration_s = s.duration;
    rep.stop_reason = s.stop_reason;
    rep.ledger = outcome.ledger;
    return rep;
}

struct RegenComparison {
    RangeReport with_regen;
    RangeReport without_regen;
    double ratio = 0.0;     // range_on / range_off
    double gain_pct = 0.0;  // (ratio - 1) * 100
};

/// Runs both legs concurrently; they share only the immutable inputs.
inline RegenComparison regen_comparison(const VehicleConfig& config, const DriveCycle& cycle,
                                        double soc_floor, double profile_interval_s = 60.0) {
    auto on = std::async(std::launch::async, [&] {
        return range_test(config, cycle, true, soc_floor, profile_interval_s);
    });
    auto off = range_test(config, cycle, false, soc_floor, profile_interval_s);
    RegenComparison cmp;
    cmp.with_regen = on.get();
    cmp.without_regen = std::move(off);
    cmp.ratio = cmp.without_regen.distance_km > 0.0
                    ? cmp.with_regen.distance_km / cmp.without_regen.distance_km
                    : 0.0;
    cmp.gain_pct = cmp.without_regen.distance_km > 0.0 ? (cmp.ratio - 1.0) * 100.0 : 0.0;
    return cmp;
}

// ---------------------------------------------------------------------------
// Powertrain capability

/// Largest vehicle speed [km/h] the gear ratio allows at the motor's max rpm.
inline double speed_limit_from_motor(const VehicleConfig& c) {
    return vehicle_speed_from_motor(c.motor.max_speed, c.body.wheel_radius, c.drivetrain.gear_ratio);
}

/// Tractive force at the wheels with the motor at its envelope, v in km/h.
inline double max_tractive_force(const VehicleConfig& c, double v_kmh) {
    const double n = motor_speed_from_vehicle(v_kmh, c.body.wheel_radius, c.drivetrain.gear_ratio);
    if (n > c.motor.max_speed) return 0.0;
    return wheel_torque(available_torque(c.motor, n), c.drivetrain.gear_ratio,
                        c.drivetrain.transmission_efficiency) /
           c.body.wheel_radius;
}

/// Road-load power [kW] at a steady speed: v (RR + WR) / 3600.
inline double size_motor(const VehicleConfig& c, double design_speed_kmh) {
    if (!(design_speed_kmh > 0.0)) throw ConfigError("size_motor: design speed must be > 0");
    return design_speed_kmh *
           (rolling_resistance(c.body, design_speed_kmh) + aero_drag(c.body, design_speed_kmh)) / 3600.0;
}

/// Inverse of size_motor: the steady speed whose road load needs `power_kw`.
inline double design_speed_for_power(const VehicleConfig& c, double power_kw) {
    if (!(power_kw > 0.0)) throw ConfigError("design_speed_for_power: power must be > 0");
    double lo = 0.0;
    double hi = 100.0;
    while (size_motor(c, hi) < power_kw) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        (size_motor(c, mid) < power_kw ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Steady top speed [km/h]: root of tractive force = RR + WR by bisection,
/// capped at the motor speed limit. Above base speed this is the power
/// balance eta_t * P_max = v (RR + WR) / 3600.
inline double top_speed_oracle(const VehicleConfig& c) {
    const double cap = speed_limit_from_motor(c);
    auto surplus = [&](double v) {
        return max_tractive_force(c, v) - rolling_resistance(c.body, v) - aero_drag(c.body, v);
    };
    if (surplus(cap) >= 0.0) return cap;
    if (surplus(0.0) <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = cap;
    for (int i = 0; i < 200 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        (surplus(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct SpeedPoint {
    double t;  // s
    double v;  // km/h
};

struct AccelReport {
    double time_to_target_s = 0.0;
    double target_kmh = 0.0;
    std::vector<SpeedPoint> speed_trajectory;
};

/// Full-throttle run from rest; returns the first crossing of `target_kmh`,
/// linearly interpolated between steps.
inline AccelReport accel_test(const VehicleConfig& config, double target_kmh, double time_limit_s = 600.0) {
    AccelReport rep;
    rep.target_kmh = target_kmh;
    rep.speed_trajectory.push_back({0.0, 0.0});
    if (target_kmh <= 0.0) return rep;
    if (top_speed_oracle(config) <= target_kmh)
        throw UnreachableTargetError("target " + std::to_string(target_kmh) +
                                     " km/h is above the force-balance top speed");

    const auto cycle = constant_cycle(target_kmh, time_limit_s);
    const StepOptions opts{.regen_enabled = true, .repeat_cycle = false, .fixed_command = 1.0};
    SimState state = SimState::initial(config);
    while (state.t < time_limit_s) {
        auto [next, rec] = step(state, cycle, config, opts);
        rep.speed_trajectory.push_back({rec.t, rec.v});
        if (rec.v >= target_kmh) {
            const double v0 = state.body.speed;
            const double frac = (target_kmh - v0) / (rec.v - v0);
            rep.time_to_target_s = state.t + frac * (rec.t - state.t);
            return rep;
        }
        state = std::move(next);
    }
    throw UnreachableTargetError("target " + std::to_string(target_kmh) + " km/h not reached within " +
                                 std::to_string(time_limit_s) + " s");
}

struct TopSpeedReport {
    double vmax_kmh = 0.0;
    // First time within 1 km/h of vmax; the approach is asymptotic.
    double time_to_vmax_s = 0.0;
    double oracle_vmax_kmh = 0.0;
    double discrepancy_kmh = 0.0;  // vmax - oracle
    std::vector<SpeedPoint> speed_trajectory;
};

inline TopSpeedReport top_speed_test(const VehicleConfig& config, double duration_s = 120.0) {
    TopSpeedReport rep;
    RunOptions opts;
    opts.fixed_command = 1.0;
    opts.max_time = duration_s;
    const auto cycle = constant_cycle(0.0, duration_s);
    rep.speed_trajectory.push_back({0.0, 0.0});
    auto outcome = run_with(config, cycle, opts,
                            [&](const TraceRecord& r) { rep.speed_trajectory.push_back({r.t, r.v}); });
    rep.vmax_kmh = outcome.final_state.body.speed;
    for (const auto& p : rep.speed_trajectory) {
        if (p.v >= rep.vmax_kmh - 1.0) {
            rep.time_to_vmax_s = p.t;
            break;
        }
    }
    rep.oracle_vmax_kmh = top_speed_oracle(config);
    rep.discrepancy_kmh = rep.vmax_kmh - rep.oracle_vmax_kmh;
    return rep;
}

// ---------------------------------------------------------------------------
// SoC dynamics

struct CycleSocDelta {
    std::int64_t cycle_index;
    double soc_start;
    double soc_end;
    double delta;  // soc_end - soc_start
};

struct SocIncreaseEvent {
    double t;              // s, end of the step
    double soc_delta;      // > 0
    double command;
    double v_start_kmh;    // speed at the start of the step
    bool during_regen_braking;  // command < 0 and v_start >= cutoff
};

struct SocDynamicsReport {
    std::vector<CycleSocDelta> per_cycle;
    std::vector<SocIncreaseEvent> increase_events;
    std::size_t unexplained_increases = 0;  // events not during regen braking
    bool consistent() const { return unexplained_increases == 0; }
};

/// Scans a full-rate trace (every step present, starting at the first step
/// of the run). Speeds at step start come from the previous record; the run
/// starts from rest at `soc_start`.
inline SocDynamicsReport soc_dynamics_report(const SimTrace& trace, double soc_start,
                                             double cycle_duration_s, double regen_cutoff_kmh) {
    SocDynamicsReport rep;
    double prev_soc = soc_start;
    double prev_v = 0.0;
    std::int64_t current_cycle = 0;
    double cycle_soc_start = soc_start;
    constexpr double kTimeEps = 1e-9;
    for (const auto& r : trace) {
        if (r.soc > prev_soc) {
            SocIncreaseEvent e{r.t, r.soc - prev_soc, r.command, prev_v,
                               r.command < 0.0 && prev_v >= regen_cutoff_kmh};
            if (!e.during_regen_braking) ++rep.unexplained_increases;
            rep.increase_events.push_back(e);
        }
        const auto idx = static_cast<std::int64_t>(std::floor((r.t - kTimeEps) / cycle_duration_s));
        if (idx > current_cycle) {
            rep.per_cycle.push_back({current_cycle, cycle_soc_start, prev_soc, prev_soc - cycle_soc_start});
            current_cycle = idx;
            cycle_soc_start = prev_soc;
        }
        prev_soc = r.soc;
        prev_v = r.v;
    }
    if (!trace.empty())
        rep.per_cycle.push_back({current_cycle, cycle_soc_start, prev_soc, prev_soc - cycle_soc_start});
    return rep;
}

inline SocDynamicsReport soc_dynamics_report(const SimTrace& trace, const VehicleConfig& config,
                                             double cycle_duration_s) {
    return soc_dynamics_report(trace, config.battery.initial_soc, cycle_duration_s,
                               config.drivetrain.regen_cutoff_speed);
}

}  // namespace evsim
