#pragma once

// Serialization of run results: per-step trace CSV and JSON summaries.

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evsim/drive_cycle.hpp"
#include "evsim/experiments.hpp"
#include "evsim/sim_engine.hpp"

namespace evsim {

inline constexpr int kSummarySchemaVersion = 1;

inline constexpr std::string_view kTraceHeader =
    "t_s,v_target_kmh,v_kmh,dist_km,cmd,motor_nm,motor_rpm,fric_n,batt_kw,current_a,volt_v,soc,rr_n,wr_n,"
    "accel_ms2";

namespace detail {

inline constexpr std::size_t kTraceColumns = 15;

inline std::array<double, kTraceColumns> trace_row(const TraceRecord& r) {
    return {r.t,          r.v_target,       r.v,       r.distance,   r.command,
            r.motor_torque, r.motor_speed,  r.friction_force, r.battery_power, r.current,
            r.voltage,    r.soc,            r.rolling, r.aero,       r.accel};
}

inline void append_g6(std::string& out, double x) {
    char buf[32];
    // Normalize -0 so identical runs give identical bytes regardless of sign bit.
    if (x == 0.0) x = 0.0;
    const int n = std::snprintf(buf, sizeof buf, "%.6g", x);
    out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace detail

/// CSV with the fixed header and 6 significant digits per value. `every`
/// keeps one row in N (the last row is always kept).
inline std::string format_trace_csv(const SimTrace& trace, std::size_t every = 1) {
    if (every == 0) every = 1;
    std::string out(kTraceHeader);
    out.push_back('\n');
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if ((i + 1) % every != 0 && i + 1 != trace.size()) continue;
        const auto row = detail::trace_row(trace[i]);
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out.push_back(',');
            detail::append_g6(out, row[k]);
        }
        out.push_back('\n');
    }
    return out;
}

inline void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write to '" + path + "' failed");
}

inline void emit_trace(const SimTrace& trace, const std::string& path, std::size_t every = 1) {
    write_text_file(path, format_trace_csv(trace, every));
}

inline SimTrace parse_trace_csv(std::string_view text) {
    SimTrace out;
    std::size_t pos = 0;
    bool header = false;
    std::size_t row = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = detail::trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        if (line.empty()) continue;
        if (!header) {
            if (line != kTraceHeader) throw IoError("trace CSV: unexpected header");
            header = true;
            continue;
        }
        ++row;
        std::array<double, detail::kTraceColumns> v{};
        std::size_t col = 0;
        std::size_t start = 0;
        while (col < v.size()) {
            const auto comma = line.find(',', start);
            const auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
            if (!detail::parse_double(field, v[col]))
                throw IoError("trace CSV: bad value in row " + std::to_string(row));
            ++col;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (col != v.size()) throw IoError("trace CSV: wrong column count in row " + std::to_string(row));
        out.push_back(TraceRecord{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11],
                                  v[12], v[13], v[14]});
    }
    if (!header) throw IoError("trace CSV: missing header");
    return out;
}

// ---------------------------------------------------------------------------
// JSON

using Json = nlohmann::ordered_json;

inline Json to_json(const EnergyLedger& l) {
    const auto check = ledger_check(l);
    return Json{{"battery_out_kwh", l.battery_out},
                {"battery_regen_in_kwh", l.battery_regen_in},
                {"kinetic_delta_kwh", l.kinetic_delta},
                {"rolling_loss_kwh", l.rolling_loss},
                {"aero_loss_kwh", l.aero_loss},
                {"friction_brake_loss_kwh", l.friction_brake_loss},
                {"drivetrain_loss_kwh", l.drivetrain_loss},
                {"resistive_internal_loss_kwh", l.resistive_internal_loss},
                {"residual_kwh", l.residual()},
                {"residual_fraction", check.residual_fraction},
                {"check_passed", check.pass}};
}

inline Json to_json(const SimSummary& s) {
    return Json{{"duration_s", s.duration},
                {"distance_km", s.distance},
                {"soc_start", s.soc_start},
                {"soc_end", s.soc_end},
                {"max_tracking_error_kmh", s.max_tracking_error},
                {"max_tracking_error_pct", s.max_tracking_error_pct},
                {"energy_out_kwh", s.energy_out},
                {"energy_regen_kwh", s.energy_regen},
                {"cycles_completed", s.cycles_completed},
                {"stop_reason", to_string(s.stop_reason)}};
}

inline Json to_json(const RangeReport& r) {
    return Json{{"distance_km", r.distance_km},
                {"cycles_completed", r.cycles_completed},
                {"soc_start", r.soc_start},
                {"soc_end", r.soc_end},
                {"energy_out_kwh", r.energy_out_kwh},
                {"energy_regen_kwh", r.energy_regen_kwh},
                {"regen_enabled", r.regen_enabled},
                {"duration_s", r.duration_s},
                {"stop_reason", to_string(r.stop_reason)},
                {"ledger", to_json(r.ledger)}};
}

inline Json to_json(const RegenComparison& c) {
    return Json{{"with_regen", to_json(c.with_regen)},
                {"without_regen", to_json(c.without_regen)},
                {"range_ratio", c.ratio},
                {"gain_pct", c.gain_pct}};
}

inline Json to_json(const AccelReport& a) {
    return Json{{"target_kmh", a.target_kmh},
                {"time_to_target_s", a.time_to_target_s},
                {"trajectory_points", a.speed_trajectory.size()}};
}

inline Json to_json(const TopSpeedReport& t) {
    return Json{{"vmax_kmh", t.vmax_kmh},
                {"time_to_vmax_s", t.time_to_vmax_s},
                {"oracle_vmax_kmh", t.oracle_vmax_kmh},
                {"discrepancy_kmh", t.discrepancy_kmh}};
}

inline Json to_json(const CycleStats& s) {
    return Json{{"duration_s", s.duration},
                {"distance_km", s.distance},
                {"max_speed_kmh", s.max_speed},
                {"mean_speed_kmh", s.mean_speed}};
}

/// Wraps a payload with the schema version and a kind tag.
inline Json make_document(std::string_view kind, Json payload) {
    Json doc{{"schema_version", kSummarySchemaVersion}, {"kind", std::string(kind)}};
    for (auto& [k, v] : payload.items()) doc[k] = v;
    return doc;
}

/// Profile CSV for range runs: t_s,dist_km,soc.
inline std::string format_profile_csv(const std::vector<ProfilePoint>& profile) {
    std::string out = "t_s,dist_km,soc\n";
    for (const auto& p : profile) {
        detail::append_g6(out, p.t);
        out.push_back(',');
        detail::append_g6(out, p.distance);
        out.push_back(',');
        detail::append_g6(out, p.soc);
        out.push_back('\n');
    }
    return out;
}

}  // namespace evsim
