#pragma once

// Target-speed schedules: CSV ingestion, interpolation, statistics and
// synthetic fixtures.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "evsim/units.hpp"

namespace evsim {

struct CycleSample {
    double t;  // s
    double v;  // km/h

    friend bool operator==(const CycleSample&, const CycleSample&) = default;
};

struct CycleStats {
    double duration;    // s
    double distance;    // km
    double max_speed;   // km/h
    double mean_speed;  // km/h, distance / duration
};

class DriveCycle {
public:
    /// Throws CycleError unless times start at 0, strictly increase, speeds
    /// are non-negative and there are at least two samples.
    DriveCycle(std::vector<CycleSample> samples, std::string name = {})
        : samples_(std::move(samples)), name_(std::move(name)) {
        if (samples_.size() < 2) throw CycleError("drive cycle needs at least 2 samples");
        if (samples_.front().t != 0.0) throw CycleError("drive cycle must start at t = 0");
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            const auto& s = samples_[i];
            if (!std::isfinite(s.t) || !std::isfinite(s.v))
                throw CycleError("non-finite value at sample " + std::to_string(i));
            if (s.v < 0) throw CycleError("negative speed at sample " + std::to_string(i));
            if (i > 0 && !(s.t > samples_[i - 1].t))
                throw CycleError("non-monotonic time at sample " + std::to_string(i));
        }
    }

    const std::vector<CycleSample>& samples() const { return samples_; }
    const std::string& name() const { return name_; }
    double duration() const { return samples_.back().t; }

    /// Linear interpolation; clamps to the last sample past the end.
    double target_speed(double t) const {
        if (t <= 0.0) return samples_.front().v;
        if (t >= duration()) return samples_.back().v;
        auto hi = std::upper_bound(samples_.begin(), samples_.end(), t,
                                   [](double x, const CycleSample& s) { return x < s.t; });
        auto lo = hi - 1;
        if (t == lo->t) return lo->v;
        const double w = (t - lo->t) / (hi->t - lo->t);
        return lo->v + w * (hi->v - lo->v);
    }

    /// Largest |dv/dt| over all segments, km/h per s.
    double max_slope() const {
        double m = 0.0;
        for (std::size_t i = 1; i < samples_.size(); ++i) {
            const auto& a = samples_[i - 1];
            const auto& b = samples_[i];
            m = std::max(m, std::abs(b.v - a.v) / (b.t - a.t));
        }
        return m;
    }

private:
    std::vector<CycleSample> samples_;
    std::string name_;
};

inline double target_speed(const DriveCycle& cycle, double t) { return cycle.target_speed(t); }

inline CycleStats cycle_stats(const DriveCycle& cycle) {
    const auto& s = cycle.samples();
    double dist_m = 0.0;
    double vmax = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        vmax = std::max(vmax, s[i].v);
        if (i > 0)
            dist_m += 0.5 * (units::kmh_to_ms(s[i - 1].v) + units::kmh_to_ms(s[i].v)) *
                      (s[i].t - s[i - 1].t);
    }
    const double dur = cycle.duration();
    const double dist_km = units::m_to_km(dist_m);
    return CycleStats{dur, dist_km, vmax, dist_km / (dur / units::kSecondsPerHour)};
}

/// Back-to-back concatenation with time offsets. The boundary sample shared by
/// consecutive copies is kept once, so the cycle must end at its start speed.
inline DriveCycle repeat(const DriveCycle& cycle, int n) {
    if (n < 1) throw CycleError("repeat count must be >= 1");
    if (n == 1) return cycle;
    const auto& s = cycle.samples();
    const double dur = cycle.duration();
    std::vector<CycleSample> out;
    out.reserve(s.size() * static_cast<std::size_t>(n));
    out = s;
    for (int k = 1; k < n; ++k) {
        const double offset = dur * k;
        if (s.front().v != out.back().v)
            throw CycleError("repeat: cycle must start and end at the same speed");
        for (std::size_t i = 1; i < s.size(); ++i) out.push_back({s[i].t + offset, s[i].v});
    }
    return DriveCycle(std::move(out), cycle.name() + " x" + std::to_string(n));
}

/// 0 -> peak over `ramp` seconds, hold for `hold`, then peak -> 0 over `ramp`.
inline DriveCycle synth_trapezoid(double peak_kmh, double ramp_s, double hold_s) {
    if (!(peak_kmh >= 0) || !(ramp_s > 0) || !(hold_s >= 0))
        throw CycleError("synth_trapezoid: need peak >= 0, ramp > 0, hold >= 0");
    std::vector<CycleSample> s{{0.0, 0.0}, {ramp_s, peak_kmh}};
    if (hold_s > 0) s.push_back({ramp_s + hold_s, peak_kmh});
    s.push_back({2 * ramp_s + hold_s, 0.0});
    return DriveCycle(std::move(s), "trapezoid");
}

/// Constant target, useful for full-throttle runs.
inline DriveCycle constant_cycle(double v_kmh, double duration_s) {
    return DriveCycle({{0.0, v_kmh}, {duration_s, v_kmh}}, "constant");
}

// ---------------------------------------------------------------------------
// CSV: header `t_s,v_kmh`, one sample per line.

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace detail

/// Rows are numbered from 1 for the first data line after the header.
inline DriveCycle parse_cycle(std::string_view text, std::string name = {}) {
    std::vector<CycleSample> samples;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header_seen = false;
    // Skip a UTF-8 BOM.
    if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = detail::trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        if (line.empty()) {
            if (nl == text.size()) break;
            continue;
        }
        if (!header_seen) {
            if (line != "t_s,v_kmh")
                throw CycleError("cycle CSV: expected header 't_s,v_kmh', got '" + std::string(line) + "'");
            header_seen = true;
            continue;
        }
        ++line_no;
        const auto comma = line.find(',');
        double t = 0;
        double v = 0;
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos ||
            !detail::parse_double(line.substr(0, comma), t) ||
            !detail::parse_double(line.substr(comma + 1), v))
            throw CycleError("cycle CSV: malformed row " + std::to_string(line_no) + ": '" +
                             std::string(line) + "'");
        if (!std::isfinite(t) || !std::isfinite(v))
            throw CycleError("cycle CSV: non-finite value in row " + std::to_string(line_no));
        if (v < 0) throw CycleError("cycle CSV: negative speed in row " + std::to_string(line_no));
        if (!samples.empty() && !(t > samples.back().t))
            throw CycleError("cycle CSV: non-monotonic time at row " + std::to_string(line_no));
        samples.push_back({t, v});
        if (nl == text.size()) break;
    }
    if (!header_seen) throw CycleError("cycle CSV: empty document");
    if (!samples.empty() && samples.front().t != 0.0)
        throw CycleError("cycle CSV: first sample must be at t = 0");
    return DriveCycle(std::move(samples), std::move(name));
}

/// Shortest round-trip decimal form, so parse(serialize(c)) is bit-exact.
inline std::string serialize_cycle(const DriveCycle& cycle) {
    std::string out = "t_s,v_kmh\n";
    char buf[64];
    for (const auto& s : cycle.samples()) {
        auto r = std::to_chars(buf, buf + sizeof buf, s.t);
        out.append(buf, r.ptr);
        out.push_back(',');
        r = std::to_chars(buf, buf + sizeof buf, s.v);
        out.append(buf, r.ptr);
        out.push_back('\n');
    }
    return out;
}

inline DriveCycle load_cycle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CycleError("cannot open cycle file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string name = path;
    if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
    if (auto dot = name.rfind('.'); dot != std::string::npos) name = name.substr(0, dot);
    return parse_cycle(ss.str(), name);
}

}  // namespace evsim
