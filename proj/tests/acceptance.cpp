// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "evsim/evsim.hpp"
#include "support/oracles.hpp"

using namespace evsim;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const DriveCycle& udds() {
    static const DriveCycle c = load_cycle(EVSIM_DATA_DIR "/udds.csv");
    return c;
}

Outcome check_speed_tracking() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run(VehicleConfig{}, udds());
    const double secs = seconds_since(t0);
    const double vmax = cycle_stats(udds()).max_speed;
    const double limit = 0.015 * vmax;
    const bool ok = r.summary.duration == udds().duration() && r.summary.max_tracking_error <= limit && secs < 1.0;
    return {ok, fmt("max |v - v_target| = %.3f km/h (%.2f%% of %.1f km/h, limit %.3f); runtime %.3f s", 
                    r.summary.max_tracking_error, r.summary.max_tracking_error_pct, vmax, limit, secs)};
}

Outcome check_regen_gain() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cmp = regen_comparison(VehicleConfig{}, udds(), 0.1);
    const double secs = seconds_since(t0);
    const bool ok = cmp.gain_pct > 0.0 && cmp.gain_pct >= 10.0 && cmp.gain_pct <= 40.0 && secs < 30.0 &&
                    cmp.with_regen.stop_reason == StopReason::soc_floor &&
                    cmp.without_regen.stop_reason == StopReason::soc_floor;
    return {ok, fmt("gain %.2f%% (band 10-40%%); range %.1f km with regen (%lld cycles), %.1f km without "
                    "(%lld cycles); reference figures 23%% / 25%% / 25.5%% and ~352 km over 32 cycles are "
                    "not reproducible with a 216 kWh pack; runtime %.2f s",
                    cmp.gain_pct, cmp.with_regen.distance_km,
                    static_cast<long long>(cmp.with_regen.cycles_completed), cmp.without_regen.distance_km,
                    static_cast<long long>(cmp.without_regen.cycles_completed), secs)};
}

Outcome check_top_speed() {
    const VehicleConfig c;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = top_speed_test(c);
    const double secs = seconds_since(t0);
    const double ref = oracle::top_speed(c);
    const bool ok = std::abs(rep.vmax_kmh - ref) <= 2.0 && secs < 2.0;
    return {ok, fmt("settled %.2f km/h vs force-balance root %.2f km/h (diff %+.2f, tolerance 2); "
                    "reference figure ~190 km/h is a known discrepancy (%+.1f km/h); runtime %.3f s",
                    rep.vmax_kmh, ref, rep.vmax_kmh - ref, rep.vmax_kmh - 190.0, secs)};
}

Outcome check_acceleration() {
    const VehicleConfig c;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = accel_test(c, 100.0);
    const double secs = seconds_since(t0);
    const double ref = oracle::accel_time(c, 100.0, 1e-3);
    const double rel = std::abs(rep.time_to_target_s - ref) / ref;
    const bool ok = rel <= 0.01 && secs < 2.0;
    return {ok, fmt("0-100 km/h in %.3f s vs fine-step oracle %.3f s (%.3f%%, tolerance 1%%); reference "
                    "figure 9.5 s is a known discrepancy (%+.2f s); runtime %.3f s",
                    rep.time_to_target_s, ref, 100.0 * rel, rep.time_to_target_s - 9.5, secs)};
}

Outcome check_energy_conservation() {
    const auto rep = range_test(VehicleConfig{}, udds(), true, 0.1);
    const auto check = ledger_check(rep.ledger);
    return {check.pass && rep.stop_reason == StopReason::soc_floor,
            fmt("full range run: battery out %.3f kWh, residual %.3e kWh (%.2e of out, limit 5e-3)",
                rep.ledger.battery_out, check.residual_kwh, check.residual_fraction)};
}

Outcome check_dt_refinement() {
    VehicleConfig fine;
    fine.sim.dt = 0.01;
    const auto a = run(VehicleConfig{}, udds()).summary;
    const auto b = run(fine, udds()).summary;
    const double dd = std::abs(a.distance - b.distance) / b.distance;
    const double ds = std::abs(a.soc_end - b.soc_end) / b.soc_end;
    return {dd < 0.005 && ds < 0.005,
            fmt("distance %.5f vs %.5f km (%.4f%%); final SoC %.6f vs %.6f (%.5f%%); limit 0.5%%", a.distance,
                b.distance, 100 * dd, a.soc_end, b.soc_end, 100 * ds)};
}

Outcome check_formulas() {
    const VehicleConfig c;
    auto rel = [](double got, double want) { return std::abs(got - want) <= 1e-9 * std::abs(want); };
    struct Row {
        const char* name;
        double got;
        double want;
        double shown;
    };
    const Row rows[] = {
        {"rolling resistance", rolling_resistance(c.body, 50), 1549 * 9.81 * 0.021, 319.11},
        {"aero drag @100", aero_drag(c.body, 100), 0.42 * 1.87 * 1e4 / 21.15, 371.35},
        {"rated point", motor_electrical_power(95.5, 3000, 1.0), 30.0, 30.0},
        {"V(100 A)", battery_step(BatteryState::initial(c.battery), 100, 0.1, c.battery).terminal_voltage, 340.0,
         340.0},
        {"Cb", derived_quantities(c).battery_capacity_ah, 216000.0 / 350.0, 617.14},
        {"size_motor(120)", size_motor(c, 120),
         120 * (1549 * 9.81 * 0.021 + 0.42 * 1.87 * 120 * 120 / 21.15) / 3600, 28.46},
    };
    bool ok = true;
    std::string detail;
    for (const auto& r : rows) {
        const bool row_ok = rel(r.got, r.want) && std::abs(r.got - r.shown) < 0.005 + 1e-12;
        ok = ok && row_ok;
        detail += fmt("%s%s=%.4f%s", detail.empty() ? "" : "; ", r.name, r.got, row_ok ? "" : " (MISMATCH)");
    }
    return {ok, detail};
}

Outcome check_regen_equivalence() {
    VehicleConfig zero;
    zero.drivetrain.regen_efficiency = 0.0;
    RunOptions off;
    off.regen_enabled = false;
    const auto a = run(VehicleConfig{}, udds(), off).trace;
    const auto b = run(zero, udds()).trace;
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].soc == b[i].soc;
    return {same, fmt("%zu SoC samples, regen disabled vs regen_efficiency = 0: %s", a.size(),
                      same ? "bit-identical" : "DIFFER")};
}

Outcome check_soc_dynamics() {
    const VehicleConfig c;
    RunOptions on;
    on.repeat_cycle = true;
    on.max_time = 2 * udds().duration();
    const auto t_on = run(c, udds(), on).trace;
    const auto rep_on = soc_dynamics_report(t_on, c, udds().duration());
    RunOptions off = on;
    off.regen_enabled = false;
    const auto rep_off = soc_dynamics_report(run(c, udds(), off).trace, c, udds().duration());
    const bool ok = !rep_on.increase_events.empty() && rep_on.consistent() && rep_off.increase_events.empty();
    return {ok, fmt("regen on: %zu SoC increase steps, %zu not during braking above %.1f km/h; regen off: %zu "
                    "increase steps",
                    rep_on.increase_events.size(), rep_on.unexplained_increases,
                    c.drivetrain.regen_cutoff_speed, rep_off.increase_events.size())};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"A1 speed tracking", check_speed_tracking},
        {"A2 regen range gain", check_regen_gain},
        {"A3 top speed", check_top_speed},
        {"A4 acceleration", check_acceleration},
        {"A5 energy conservation", check_energy_conservation},
        {"A6 dt refinement", check_dt_refinement},
        {"A7 formula checks", check_formulas},
        {"A8 regen-off equivalence", check_regen_equivalence},
        {"A9 SoC dynamics", check_soc_dynamics},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s  %-26s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
