#pragma once

// Minimal standalone SVG line charts. Output is a pure function of the data
// (no timestamps, fixed number formatting), so identical inputs give
// identical files.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "evsim/experiments.hpp"
#include "evsim/report_io.hpp"
#include "evsim/sim_engine.hpp"

namespace evsim::plot {

struct Series {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;
};

struct Panel {
    std::string y_label;
    std::vector<Series> series;
};

struct Figure {
    std::string title;
    std::string x_label;
    std::vector<Panel> panels;

    bool empty() const {
        for (const auto& p : panels)
            for (const auto& s : p.series)
                if (!s.points.empty()) return false;
        return true;
    }
};

enum class Kind { tracking, range_soc, accel, soc_dynamics, topspeed };

namespace detail {

inline std::string num(double x) {
    char buf[32];
    if (x == 0.0) x = 0.0;
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

inline std::string tick_label(double x, double step) {
    char buf[32];
    if (x == 0.0) x = 0.0;
    const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

/// 1-2-5 tick spacing giving roughly `target` intervals.
inline double nice_step(double span, int target = 6) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    const double nice = f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0;
    return nice * mag;
}

struct Range {
    double lo;
    double hi;
};

inline Range padded(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = std::max(1.0, std::abs(lo) * 0.1);
        return {lo - pad, hi + pad};
    }
    const double step = nice_step(hi - lo);
    return {std::floor(lo / step) * step, std::ceil(hi / step) * step};
}

// Keeps at most `max_points` points (first and last always kept).
inline std::vector<std::pair<double, double>> thin(const std::vector<std::pair<double, double>>& pts,
                                                   std::size_t max_points = 4000) {
    if (pts.size() <= max_points) return pts;
    std::vector<std::pair<double, double>> out;
    const std::size_t stride = (pts.size() + max_points - 1) / max_points;
    for (std::size_t i = 0; i < pts.size(); i += stride) out.push_back(pts[i]);
    if (out.back() != pts.back()) out.push_back(pts.back());
    return out;
}

}  // namespace detail

inline std::string render_svg(const Figure& fig) {
    using detail::num;
    constexpr double kWidth = 900.0;
    constexpr double kPanelHeight = 300.0;
    constexpr double kLeft = 80.0;
    constexpr double kRight = 30.0;
    constexpr double kTop = 50.0;
    constexpr double kGap = 60.0;
    constexpr double kBottom = 60.0;

    const double n_panels = static_cast<double>(fig.panels.size());
    const double height = kTop + n_panels * kPanelHeight + (n_panels - 1) * kGap + kBottom;
    const double plot_w = kWidth - kLeft - kRight;

    double x_lo = 0.0;
    double x_hi = 0.0;
    bool have_x = false;
    for (const auto& p : fig.panels)
        for (const auto& s : p.series)
            for (const auto& [x, y] : s.points) {
                if (!have_x) x_lo = x_hi = x, have_x = true;
                x_lo = std::min(x_lo, x);
                x_hi = std::max(x_hi, x);
            }
    const auto xr = detail::padded(x_lo, x_hi);
    const double x_step = detail::nice_step(xr.hi - xr.lo);

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(height) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(height) + "\" font-family=\"sans-serif\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\">" +
           detail::escape(fig.title) + "</text>\n";

    for (std::size_t pi = 0; pi < fig.panels.size(); ++pi) {
        const auto& panel = fig.panels[pi];
        const double top = kTop + static_cast<double>(pi) * (kPanelHeight + kGap);
        double y_lo = 0.0;
        double y_hi = 0.0;
        bool have_y = false;
        for (const auto& s : panel.series)
            for (const auto& [x, y] : s.points) {
                if (!have_y) y_lo = y_hi = y, have_y = true;
                y_lo = std::min(y_lo, y);
                y_hi = std::max(y_hi, y);
            }
        const auto yr = detail::padded(y_lo, y_hi);
        const double y_step = detail::nice_step(yr.hi - yr.lo);
        auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
        auto py = [&](double y) { return top + kPanelHeight - (y - yr.lo) / (yr.hi - yr.lo) * kPanelHeight; };

        // Grid and ticks.
        for (double y = yr.lo; y <= yr.hi + 1e-9 * y_step; y += y_step) {
            svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(y)) + "\" x2=\"" + num(kLeft + plot_w) +
                   "\" y2=\"" + num(py(y)) + "\" stroke=\"#dddddd\"/>\n";
            svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(y) + 4) +
                   "\" text-anchor=\"end\" font-size=\"11\">" + detail::tick_label(y, y_step) + "</text>\n";
        }
        for (double x = xr.lo; x <= xr.hi + 1e-9 * x_step; x += x_step) {
            svg += "<line x1=\"" + num(px(x)) + "\" y1=\"" + num(top) + "\" x2=\"" + num(px(x)) + "\" y2=\"" +
                   num(top + kPanelHeight) + "\" stroke=\"#eeeeee\"/>\n";
            svg += "<text x=\"" + num(px(x)) + "\" y=\"" + num(top + kPanelHeight + 16) +
                   "\" text-anchor=\"middle\" font-size=\"11\">" + detail::tick_label(x, x_step) + "</text>\n";
        }
        svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) + "\" height=\"" +
               num(kPanelHeight) + "\" fill=\"none\" stroke=\"black\"/>\n";
        const double label_y = top + kPanelHeight / 2;
        svg += "<text x=\"20\" y=\"" + num(label_y) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 " +
               num(label_y) + ")\">" + detail::escape(panel.y_label) + "</text>\n";

        // Curves.
        for (const auto& s : panel.series) {
            if (s.points.empty()) continue;
            svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"";
            bool first = true;
            for (const auto& [x, y] : detail::thin(s.points)) {
                if (!first) svg.push_back(' ');
                first = false;
                svg += num(px(x)) + "," + num(py(y));
            }
            svg += "\"/>\n";
        }

        // Legend.
        double ly = top + 16;
        for (const auto& s : panel.series) {
            const double lx = kLeft + plot_w - 190;
            svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 24) + "\" y2=\"" +
                   num(ly - 4) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
            svg += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly) + "\" font-size=\"12\">" +
                   detail::escape(s.label) + "</text>\n";
            ly += 16;
        }
    }
    svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(height - 18) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + detail::escape(fig.x_label) + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

/// Throws without touching `path` when the figure has no data.
inline void emit_plot(const Figure& fig, const std::string& path) {
    if (fig.empty()) throw IoError("plot '" + fig.title + "' has no data");
    write_text_file(path, render_svg(fig));
}

// ---------------------------------------------------------------------------
// Figure builders

inline Figure tracking_figure(const SimTrace& trace) {
    Series target{"target speed", "#d62728", {}};
    Series actual{"vehicle speed", "#1f77b4", {}};
    for (const auto& r : trace) {
        target.points.emplace_back(r.t, r.v_target);
        actual.points.emplace_back(r.t, r.v);
    }
    return Figure{"Velocity tracking", "time [s]", {Panel{"speed [km/h]", {target, actual}}}};
}

inline Figure soc_dynamics_figure(const SimTrace& trace) {
    Series speed{"vehicle speed", "#1f77b4", {}};
    Series soc{"state of charge", "#2ca02c", {}};
    for (const auto& r : trace) {
        speed.points.emplace_back(r.t, r.v);
        soc.points.emplace_back(r.t, r.soc);
    }
    return Figure{"SoC dynamics", "time [s]", {Panel{"speed [km/h]", {speed}}, Panel{"SoC [-]", {soc}}}};
}

inline Figure range_figure(const std::vector<const RangeReport*>& reports) {
    Panel dist{"distance [km]", {}};
    Panel soc{"SoC [-]", {}};
    for (const auto* r : reports) {
        const std::string tag = r->regen_enabled ? "regen on" : "regen off";
        const std::string color = r->regen_enabled ? "#1f77b4" : "#ff7f0e";
        Series d{"distance, " + tag, color, {}};
        Series s{"SoC, " + tag, color, {}};
        for (const auto& p : r->profile) {
            d.points.emplace_back(p.t / 3600.0, p.distance);
            s.points.emplace_back(p.t / 3600.0, p.soc);
        }
        dist.series.push_back(std::move(d));
        soc.series.push_back(std::move(s));
    }
    return Figure{"Travel distance and state of charge", "time [h]", {dist, soc}};
}

inline Figure range_figure(const RangeReport& report) { return range_figure({&report}); }

inline Figure range_figure(const RegenComparison& cmp) {
    return range_figure({&cmp.with_regen, &cmp.without_regen});
}

inline Figure accel_figure(const AccelReport& rep) {
    Series v{"vehicle speed", "#1f77b4", {}};
    Series target{"target speed", "#d62728", {}};
    for (const auto& p : rep.speed_trajectory) {
        v.points.emplace_back(p.t, p.v);
        target.points.emplace_back(p.t, rep.target_kmh);
    }
    return Figure{"Full-throttle acceleration", "time [s]", {Panel{"speed [km/h]", {target, v}}}};
}

inline Figure topspeed_figure(const TopSpeedReport& rep) {
    Series v{"vehicle speed", "#1f77b4", {}};
    Series oracle{"force-balance top speed", "#7f7f7f", {}};
    for (const auto& p : rep.speed_trajectory) {
        v.points.emplace_back(p.t, p.v);
        oracle.points.emplace_back(p.t, rep.oracle_vmax_kmh);
    }
    return Figure{"Top speed", "time [s]", {Panel{"speed [km/h]", {oracle, v}}}};
}

}  // namespace evsim::plot
