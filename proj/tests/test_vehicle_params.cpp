#include <gtest/gtest.h>

#include <random>
#include <string>

#include "evsim/evsim.hpp"

using namespace evsim;

namespace {

bool has_violation(const std::vector<Violation>& v, const std::string& constraint) {
    for (const auto& x : v)
        if (x.constraint == constraint) return true;
    return false;
}

const char* kReferenceDoc = R"({
  "body": {"mass": 1549, "wheel_radius": 0.284, "frontal_area": 1.87, "drag_coefficient": 0.42,
           "f0": 0.021, "f1": 0, "f4": 0},
  "motor": {"rated_torque": 95.5, "max_torque": 230, "rated_power": 30, "max_power": 75,
            "rated_speed": 3000, "max_speed": 8000},
  "battery": {"capacity_energy": 216, "initial_soc": 0.9},
  "drivetrain": {"transmission_efficiency": 0.9, "max_friction_brake_force": 800, "regen_efficiency": 0.5}
})";

}  // namespace

TEST(ParseConfig, ReferenceTablesPopulateConfig) {
    const auto c = parse_config(kReferenceDoc);
    EXPECT_EQ(c.body.mass, 1549.0);
    EXPECT_EQ(c.body.drag_coefficient, 0.42);
    EXPECT_EQ(c.motor.rated_power, 30.0);
    EXPECT_EQ(c.drivetrain.gear_ratio, 4.8);
}

TEST(ParseConfig, NullFieldTakesDefault) {
    const auto c = parse_config(R"({"drivetrain": {"gear_ratio": null}})");
    EXPECT_EQ(c.drivetrain.gear_ratio, 4.8);
}

TEST(ParseConfig, DefaultGearRatioPutsMotorCeilingNear180) {
    // Wheel speed at 50 m/s, scaled to 8000 rpm at the motor.
    const double wheel_rpm = 50.0 / (2.0 * 3.14159265358979 * 0.284) * 60.0;
    EXPECT_NEAR(8000.0 / wheel_rpm, 4.76, 0.005);
    EXPECT_NEAR(std::round(8000.0 / wheel_rpm * 10.0) / 10.0, VehicleConfig{}.drivetrain.gear_ratio, 1e-12);
}

TEST(ParseConfig, NegativeMassNamesField) {
    try {
        parse_config(R"({"body": {"mass": -1}})");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("mass"), std::string::npos);
    }
}

TEST(ParseConfig, MalformedDocumentThrows) {
    EXPECT_THROW(parse_config("{\"body\": "), ConfigError);
    EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
}

TEST(ParseConfig, UnknownKeysRejected) {
    EXPECT_THROW(parse_config(R"({"body": {"mas": 1500}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"bodyy": {}})"), ConfigError);
}

TEST(ParseConfig, NonNumericValueRejected) {
    EXPECT_THROW(parse_config(R"({"body": {"mass": "heavy"}})"), ConfigError);
}

TEST(ParseConfig, EmptyDocumentGivesDefaults) {
    const auto c = parse_config("{}");
    EXPECT_EQ(serialize(c), serialize(VehicleConfig{}));
}

TEST(LoadConfig, MissingFileNamesPath) {
    try {
        load_config("/nonexistent/vehicle.json");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/vehicle.json"), std::string::npos);
    }
}

TEST(Validate, DefaultsAreValid) { EXPECT_TRUE(validate(VehicleConfig{}).empty()); }

TEST(Validate, RatedTorqueAboveMax) {
    VehicleConfig c;
    c.motor.rated_torque = 300;
    EXPECT_TRUE(has_violation(validate(c), "rated_torque ≤ max_torque"));
}

TEST(Validate, SocFloorAboveInitial) {
    VehicleConfig c;
    c.battery.initial_soc = 0.05;
    c.battery.soc_floor = 0.1;
    EXPECT_TRUE(has_violation(validate(c), "soc_floor < initial_soc"));
}

TEST(Validate, ReportsEveryViolation) {
    VehicleConfig c;
    c.body.mass = -1;
    c.body.wheel_radius = 0;
    c.drivetrain.regen_efficiency = 1.5;
    c.sim.dt = 2.0;
    EXPECT_GE(validate(c).size(), 4u);
}

TEST(Validate, RatedPointConsistency) {
    VehicleConfig c;
    c.motor.rated_power = 31.0;  // 3% off tau*n/9550
    EXPECT_FALSE(validate(c).empty());
    c.motor.rated_power = 30.2;  // within 1%
    EXPECT_TRUE(validate(c).empty());
}

TEST(Validate, DriverCommandBoundsFixed) {
    VehicleConfig c;
    c.driver.command_max = 0.8;
    EXPECT_FALSE(validate(c).empty());
}

TEST(DerivedQuantities, ReferenceValues) {
    const auto d = derived_quantities(VehicleConfig{});
    EXPECT_NEAR(d.battery_capacity_ah, 216000.0 / 350.0, 1e-9);
    EXPECT_NEAR(d.battery_capacity_ah, 617.14, 0.005);
    EXPECT_NEAR(d.base_speed_rpm, 9550.0 * 75.0 / 230.0, 1e-9);
    EXPECT_NEAR(d.base_speed_rpm, 3114.0, 0.5);
    EXPECT_NEAR(d.standstill_wheel_force, 230.0 * 4.8 * 0.9 / 0.284, 1e-9);
    EXPECT_NEAR(d.standstill_wheel_force, 3498.6, 0.05);
}

TEST(DerivedQuantities, BaseSpeedIsEnvelopeCrossover) {
    const VehicleConfig c;
    const auto d = derived_quantities(c);
    EXPECT_NEAR(available_torque(c.motor, d.base_speed_rpm), c.motor.max_torque, 0.005 * c.motor.max_torque);
}

namespace {

VehicleConfig random_config(std::mt19937& rng) {
    auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    VehicleConfig c;
    c.body.mass = u(800, 3000);
    c.body.wheel_radius = u(0.25, 0.4);
    c.body.frontal_area = u(1.5, 3.0);
    c.body.drag_coefficient = u(0.2, 0.5);
    c.body.f0 = u(0.005, 0.03);
    c.body.f1 = u(0.0, 0.02);
    c.motor.max_torque = u(150, 400);
    c.motor.rated_torque = u(50, c.motor.max_torque);
    c.motor.max_speed = u(6000, 14000);
    c.motor.rated_speed = u(1500, c.motor.max_speed);
    c.motor.rated_power = c.motor.rated_torque * c.motor.rated_speed / 9550.0;
    c.motor.max_power = c.motor.rated_power * u(1.0, 3.0);
    c.motor.efficiency = u(0.8, 1.0);
    c.battery.capacity_energy = u(20, 150);
    c.battery.nominal_voltage = u(200, 800);
    c.battery.internal_resistance = u(0.0, 0.2);
    c.battery.initial_soc = u(0.5, 1.0);
    c.battery.soc_floor = u(0.0, 0.4);
    c.drivetrain.gear_ratio = u(3, 12);
    c.drivetrain.transmission_efficiency = u(0.85, 1.0);
    c.drivetrain.regen_efficiency = u(0, 1);
    c.driver.kp = u(0.1, 2);
    c.driver.ki = u(0, 1);
    c.sim.dt = u(0.01, 1.0);
    return c;
}

}  // namespace

TEST(ConfigProperties, SerializeRoundTripValidates) {
    std::mt19937 rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto c = random_config(rng);
        ASSERT_TRUE(validate(c).empty()) << i;
        const auto back = parse_config(serialize(c));
        EXPECT_TRUE(validate(back).empty());
        EXPECT_EQ(serialize(back), serialize(c));
    }
}

TEST(ConfigProperties, SiRoundTripIsIdentity) {
    std::mt19937 rng(12);
    auto rel = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), 1e-300); };
    for (int i = 0; i < 50; ++i) {
        const auto c = random_config(rng);
        const auto back = from_si(to_si(c));
        EXPECT_TRUE(rel(back.motor.max_power, c.motor.max_power));
        EXPECT_TRUE(rel(back.motor.rated_power, c.motor.rated_power));
        EXPECT_TRUE(rel(back.motor.max_speed, c.motor.max_speed));
        EXPECT_TRUE(rel(back.motor.rated_speed, c.motor.rated_speed));
        EXPECT_TRUE(rel(back.battery.capacity_energy, c.battery.capacity_energy));
        EXPECT_TRUE(rel(back.drivetrain.regen_cutoff_speed, c.drivetrain.regen_cutoff_speed));
        EXPECT_EQ(back.body.mass, c.body.mass);
    }
}

TEST(ConfigProperties, SiValuesCarryUnits) {
    const auto si = to_si(VehicleConfig{});
    EXPECT_DOUBLE_EQ(si.max_power_w, 75000.0);
    EXPECT_DOUBLE_EQ(si.capacity_j, 216.0 * 3.6e6);
    EXPECT_NEAR(si.max_speed_rad_s, 8000.0 * 2.0 * 3.14159265358979323846 / 60.0, 1e-9);
}
