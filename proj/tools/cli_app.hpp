#pragma once

// evsim command-line front end. Kept in a header so the tests can drive it
// in-process with captured streams.

#include <algorithm>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evsim/evsim.hpp"

namespace evsim::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2 };

struct Options {
    std::string config_path;
    std::string cycle_path;
    std::string out_path;
    std::string plot_path;
    std::string plot_kind = "tracking";
    bool no_regen = false;
    std::optional<double> regen_eff;
    std::optional<double> dt;
    std::size_t every = 1;
    int repeat = 1;
    std::optional<double> until_soc;
    bool compare_regen = false;
    double profile_interval = 60.0;
    double target = 100.0;
    double time_limit = 600.0;
    double duration = 120.0;
    std::optional<double> speed;
    std::optional<double> power;
};

namespace detail {

inline VehicleConfig load_effective_config(const Options& o) {
    VehicleConfig c = o.config_path.empty() ? VehicleConfig{} : load_config(o.config_path);
    if (o.dt) c.sim.dt = *o.dt;
    if (o.regen_eff) c.drivetrain.regen_efficiency = *o.regen_eff;
    if (o.dt || o.regen_eff) {
        auto violations = validate(c);
        if (!violations.empty()) {
            std::string msg = "invalid override:";
            for (const auto& v : violations) msg += "\n  " + v.to_string();
            throw ConfigError(msg);
        }
    }
    return c;
}

inline void print(std::ostream& out, const Json& doc) { out << doc.dump(2) << '\n'; }

inline std::string speed_csv(const std::vector<SpeedPoint>& pts) {
    std::string s = "t_s,v_kmh\n";
    for (const auto& p : pts) {
        evsim::detail::append_g6(s, p.t);
        s.push_back(',');
        evsim::detail::append_g6(s, p.v);
        s.push_back('\n');
    }
    return s;
}

inline int cmd_simulate(const Options& o, std::ostream& out) {
    const auto config = load_effective_config(o);
    auto cycle = load_cycle(o.cycle_path);
    if (o.repeat > 1) cycle = repeat(cycle, o.repeat);
    RunOptions ro;
    ro.regen_enabled = !o.no_regen;
    const auto result = run(config, cycle, ro);

    if (!o.out_path.empty()) emit_trace(result.trace, o.out_path, o.every);
    if (!o.plot_path.empty()) {
        const auto fig = o.plot_kind == "soc_dynamics" ? plot::soc_dynamics_figure(result.trace)
                                                       : plot::tracking_figure(result.trace);
        plot::emit_plot(fig, o.plot_path);
    }
    const auto soc = soc_dynamics_report(result.trace, config, cycle.duration() / o.repeat);
    Json payload{{"cycle", cycle.name()},
                 {"cycle_stats", to_json(cycle_stats(cycle))},
                 {"regen_enabled", ro.regen_enabled},
                 {"dt_s", config.sim.dt},
                 {"summary", to_json(result.summary)},
                 {"ledger", to_json(result.ledger)},
                 {"soc_increase_steps", soc.increase_events.size()},
                 {"soc_increases_unexplained", soc.unexplained_increases}};
    print(out, make_document("simulate", std::move(payload)));
    return kOk;
}

inline int cmd_range(const Options& o, std::ostream& out, bool compare) {
    const auto config = load_effective_config(o);
    const auto cycle = load_cycle(o.cycle_path);
    const double floor = o.until_soc.value_or(config.battery.soc_floor);
    if (compare) {
        const auto cmp = regen_comparison(config, cycle, floor, o.profile_interval);
        if (!o.out_path.empty()) {
            write_text_file(o.out_path, format_profile_csv(cmp.with_regen.profile));
            write_text_file(o.out_path + ".noregen.csv", format_profile_csv(cmp.without_regen.profile));
        }
        if (!o.plot_path.empty()) plot::emit_plot(plot::range_figure(cmp), o.plot_path);
        print(out, make_document("compare-regen", to_json(cmp)));
        return kOk;
    }
    const auto rep = range_test(config, cycle, !o.no_regen, floor, o.profile_interval);
    if (!o.out_path.empty()) write_text_file(o.out_path, format_profile_csv(rep.profile));
    if (!o.plot_path.empty()) plot::emit_plot(plot::range_figure(rep), o.plot_path);
    print(out, make_document("range", to_json(rep)));
    return kOk;
}

inline int cmd_accel(const Options& o, std::ostream& out) {
    const auto config = load_effective_config(o);
    const auto rep = accel_test(config, o.target, o.time_limit);
    if (!o.out_path.empty()) write_text_file(o.out_path, speed_csv(rep.speed_trajectory));
    if (!o.plot_path.empty()) plot::emit_plot(plot::accel_figure(rep), o.plot_path);
    print(out, make_document("accel", to_json(rep)));
    return kOk;
}

inline int cmd_topspeed(const Options& o, std::ostream& out) {
    const auto config = load_effective_config(o);
    const auto rep = top_speed_test(config, o.duration);
    if (!o.out_path.empty()) write_text_file(o.out_path, speed_csv(rep.speed_trajectory));
    if (!o.plot_path.empty()) plot::emit_plot(plot::topspeed_figure(rep), o.plot_path);
    print(out, make_document("topspeed", to_json(rep)));
    return kOk;
}

inline int cmd_size_motor(const Options& o, std::ostream& out) {
    const auto config = load_effective_config(o);
    Json payload;
    if (o.speed) {
        payload = Json{{"design_speed_kmh", *o.speed}, {"road_load_power_kw", size_motor(config, *o.speed)}};
    } else {
        payload = Json{{"road_load_power_kw", *o.power},
                       {"design_speed_kmh", design_speed_for_power(config, *o.power)}};
    }
    payload["top_speed_kmh"] = top_speed_oracle(config);
    payload["motor_speed_limit_kmh"] = speed_limit_from_motor(config);
    print(out, make_document("size-motor", std::move(payload)));
    return kOk;
}

inline int cmd_defaults(const Options& o, std::ostream& out) {
    const auto text = serialize(VehicleConfig{});
    if (!o.out_path.empty()) write_text_file(o.out_path, text);
    out << text;
    return kOk;
}

inline int cmd_validate(const Options& o, std::ostream& out) {
    const auto config = load_config(o.config_path);
    const auto d = derived_quantities(config);
    Json payload{{"valid", true},
                 {"derived",
                  {{"battery_capacity_ah", d.battery_capacity_ah},
                   {"base_speed_rpm", d.base_speed_rpm},
                   {"motor_rpm_per_kmh", d.motor_rpm_per_kmh},
                   {"standstill_wheel_force_n", d.standstill_wheel_force}}}};
    print(out, make_document("validate", std::move(payload)));
    return kOk;
}

}  // namespace detail

/// Runs one invocation. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Electric vehicle longitudinal simulator", "evsim"};
    app.require_subcommand(1);

    auto add_config = [&](CLI::App* sub, bool required = false) {
        auto* opt = sub->add_option("--config", o.config_path, "Vehicle config JSON (defaults if omitted)")
                        ->check(CLI::ExistingFile);
        if (required) opt->required()->description("Vehicle config JSON to check");
    };
    auto add_dt = [&](CLI::App* sub) {
        sub->add_option("--dt", o.dt, "Override the integration step [s]")->check(CLI::PositiveNumber);
    };
    auto add_regen = [&](CLI::App* sub) {
        auto* no = sub->add_flag("--no-regen", o.no_regen, "Disable regenerative charging");
        auto* eff = sub->add_option("--regen-eff", o.regen_eff, "Override regen efficiency in [0, 1]");
        no->excludes(eff);
    };
    auto add_out = [&](CLI::App* sub, const std::string& what) { sub->add_option("--out", o.out_path, what); };
    auto add_plot = [&](CLI::App* sub, const std::string& what) { sub->add_option("--plot", o.plot_path, what); };

    auto* sim = app.add_subcommand("simulate", "Drive a cycle once and report tracking and energy");
    add_config(sim);
    sim->add_option("--cycle", o.cycle_path, "Drive cycle CSV (t_s,v_kmh)")->required()->check(CLI::ExistingFile);
    add_out(sim, "Write the per-step trace CSV here");
    sim->add_option("--every", o.every, "Keep one trace row in N")->check(CLI::PositiveNumber);
    add_plot(sim, "Write an SVG plot here");
    sim->add_option("--plot-kind", o.plot_kind, "Plot type: tracking or soc_dynamics")
        ->check(CLI::IsMember({"tracking", "soc_dynamics"}));
    sim->add_option("--repeat", o.repeat, "Drive the cycle N times back to back")->check(CLI::PositiveNumber);
    add_regen(sim);
    add_dt(sim);

    auto* range = app.add_subcommand("range", "Repeat a cycle until the SoC floor and report the distance");
    add_config(range);
    range->add_option("--cycle", o.cycle_path, "Drive cycle CSV (t_s,v_kmh)")->required()->check(CLI::ExistingFile);
    range->add_option("--until-soc", o.until_soc, "Stop at this SoC (config soc_floor by default)")
        ->check(CLI::Range(0.0, 1.0));
    auto* both = range->add_flag("--compare-regen", o.compare_regen, "Run with and without regen and report the gain");
    range->add_option("--profile-interval", o.profile_interval, "Distance/SoC profile spacing [s]")
        ->check(CLI::PositiveNumber);
    add_out(range, "Write the distance/SoC profile CSV here");
    add_plot(range, "Write a distance and SoC SVG plot here");
    add_regen(range);
    both->excludes("--no-regen");
    add_dt(range);

    auto* cmp = app.add_subcommand("compare-regen", "Range with and without regen, run concurrently");
    add_config(cmp);
    cmp->add_option("--cycle", o.cycle_path, "Drive cycle CSV (t_s,v_kmh)")->required()->check(CLI::ExistingFile);
    cmp->add_option("--until-soc", o.until_soc, "Stop at this SoC (config soc_floor by default)")
        ->check(CLI::Range(0.0, 1.0));
    cmp->add_option("--profile-interval", o.profile_interval, "Distance/SoC profile spacing [s]")
        ->check(CLI::PositiveNumber);
    add_out(cmp, "Write the regen-on profile CSV here (regen-off goes to <path>.noregen.csv)");
    add_plot(cmp, "Write a distance and SoC SVG plot here");
    cmp->add_option("--regen-eff", o.regen_eff, "Override regen efficiency in [0, 1]");
    add_dt(cmp);

    auto* accel = app.add_subcommand("accel", "Full-throttle run from rest to a target speed");
    add_config(accel);
    accel->add_option("--target", o.target, "Target speed [km/h]")->check(CLI::NonNegativeNumber);
    accel->add_option("--time-limit", o.time_limit, "Give up after this long [s]")->check(CLI::PositiveNumber);
    add_out(accel, "Write the speed trajectory CSV here");
    add_plot(accel, "Write an SVG plot here");
    add_dt(accel);

    auto* top = app.add_subcommand("topspeed", "Full-throttle run to the settled top speed");
    add_config(top);
    top->add_option("--duration", o.duration, "Run length [s]")->check(CLI::PositiveNumber);
    add_out(top, "Write the speed trajectory CSV here");
    add_plot(top, "Write an SVG plot here");
    add_dt(top);

    auto* size = app.add_subcommand("size-motor", "Road-load power at a design speed, or the inverse");
    add_config(size);
    auto* sp = size->add_option("--speed", o.speed, "Design speed [km/h]")->check(CLI::PositiveNumber);
    auto* pw = size->add_option("--power", o.power, "Road-load power [kW]")->check(CLI::PositiveNumber);
    sp->excludes(pw);

    auto* defs = app.add_subcommand("defaults", "Print the default vehicle config");
    add_out(defs, "Also write the config JSON here");

    auto* val = app.add_subcommand("validate", "Check a config file and print derived quantities");
    add_config(val, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (size->parsed() && !o.speed && !o.power) throw CLI::RequiredError("--speed or --power");
    } catch (const CLI::CallForHelp&) {
        const auto* target = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        out << target->help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (sim->parsed()) return detail::cmd_simulate(o, out);
        if (range->parsed()) return detail::cmd_range(o, out, o.compare_regen);
        if (cmp->parsed()) return detail::cmd_range(o, out, true);
        if (accel->parsed()) return detail::cmd_accel(o, out);
        if (top->parsed()) return detail::cmd_topspeed(o, out);
        if (size->parsed()) return detail::cmd_size_motor(o, out);
        if (defs->parsed()) return detail::cmd_defaults(o, out);
        if (val->parsed()) return detail::cmd_validate(o, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const CycleError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}

}  // namespace evsim::cli
