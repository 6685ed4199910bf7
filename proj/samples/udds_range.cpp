// Drives the bundled UDDS cycle once, then estimates range with and without
// regenerative braking.

#include <cstdio>
#include <string>

#include "evsim/evsim.hpp"

int main(int argc, char** argv) {
    const std::string cycle_path = argc > 1 ? argv[1] : EVSIM_DATA_DIR "/udds.csv";
    const evsim::VehicleConfig config;
    const auto cycle = evsim::load_cycle(cycle_path);

    const auto once = evsim::run(config, cycle);
    std::printf("one cycle: %.3f km, max tracking error %.2f km/h, SoC %.4f -> %.4f\n",
                once.summary.distance, once.summary.max_tracking_error, once.summary.soc_start,
                once.summary.soc_end);

    const auto cmp = evsim::regen_comparison(config, cycle, config.battery.soc_floor);
    std::printf("range with regen:    %.1f km (%lld cycles)\n", cmp.with_regen.distance_km,
                static_cast<long long>(cmp.with_regen.cycles_completed));
    std::printf("range without regen: %.1f km (%lld cycles)\n", cmp.without_regen.distance_km,
                static_cast<long long>(cmp.without_regen.cycles_completed));
    std::printf("regen gain: %.1f %%\n", cmp.gain_pct);
}
