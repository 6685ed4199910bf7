// Acceleration, top speed and motor sizing for a vehicle config.

#include <cstdio>

#include "evsim/evsim.hpp"

int main(int argc, char** argv) {
    const auto config = argc > 1 ? evsim::load_config(argv[1]) : evsim::VehicleConfig{};

    const auto accel = evsim::accel_test(config, 100.0);
    std::printf("0-100 km/h: %.2f s\n", accel.time_to_target_s);

    const auto top = evsim::top_speed_test(config);
    std::printf("top speed: %.1f km/h (force balance %.1f km/h)\n", top.vmax_kmh, top.oracle_vmax_kmh);

    for (double v : {60.0, 90.0, 120.0})
        std::printf("road load at %3.0f km/h: %5.2f kW\n", v, evsim::size_motor(config, v));
}
