#include <gtest/gtest.h>

#include <random>

#include "evsim/evsim.hpp"

using namespace evsim;

TEST(RollingResistance, ReferenceBody) {
    const VehicleBodyParams b;
    EXPECT_NEAR(rolling_resistance(b, 50), 1549 * 9.81 * 0.021, 1e-9);
    EXPECT_NEAR(rolling_resistance(b, 130), 319.11, 0.005);
}

TEST(RollingResistance, Coefficients) {
    VehicleBodyParams b;
    b.f0 = 0;
    EXPECT_EQ(rolling_resistance(b, 80), 0.0);
    b.f0 = 0.021;
    b.f1 = 0.01;
    EXPECT_NEAR(rolling_resistance(b, 100), 1549 * 9.81 * 0.031, 1e-9);
    EXPECT_NEAR(rolling_resistance(b, 100), 471.07, 0.005);
}

TEST(AeroDrag, Quadratic) {
    const VehicleBodyParams b;
    EXPECT_EQ(aero_drag(b, 0), 0.0);
    EXPECT_NEAR(aero_drag(b, 100), 0.42 * 1.87 * 1e4 / 21.15, 1e-9);
    EXPECT_NEAR(aero_drag(b, 100), 371.35, 0.005);
    EXPECT_NEAR(aero_drag(b, 50), 92.84, 0.005);
    EXPECT_NEAR(aero_drag(b, 50) * 4, aero_drag(b, 100), 1e-9);
}

TEST(ResistanceProperties, NonNegativeAndIncreasing) {
    VehicleBodyParams b;
    b.f1 = 0.01;
    b.f4 = 0.002;
    double prev_rr = -1, prev_wr = -1;
    for (double v = 0.5; v < 250; v += 0.5) {
        const double rr = rolling_resistance(b, v), wr = aero_drag(b, v);
        ASSERT_GE(rr, 0);
        ASSERT_GT(rr, prev_rr);
        ASSERT_GT(wr, prev_wr);
        prev_rr = rr;
        prev_wr = wr;
    }
}

TEST(Acceleration, NetOverMass) {
    const auto f = ForceBreakdown::make(3498.6, 0, 0, 319.1, 0);
    EXPECT_NEAR(acceleration(f, 1549), (3498.6 - 319.1) / 1549, 1e-12);
    EXPECT_NEAR(acceleration(f, 1549), 2.053, 0.0005);
    EXPECT_EQ(acceleration(ForceBreakdown{}, 1549), 0.0);
    EXPECT_DOUBLE_EQ(acceleration(ForceBreakdown::make(0, 1000, 549, 0, 0), 1549), -1.0);
}

TEST(ForceBreakdown, NetByConstruction) {
    const auto f = ForceBreakdown::make(10, 1, 2, 3, 4);
    EXPECT_EQ(f.net, 10.0 - 1 - 2 - 3 - 4);
}

TEST(Integrate, UnitConversion) {
    const auto s = integrate(BodyState{}, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(s.speed, 3.6);
    EXPECT_DOUBLE_EQ(s.distance, 0.001);
    EXPECT_EQ(s.acceleration, 1.0);
}

TEST(Integrate, NoReverse) {
    const auto s = integrate(BodyState{10, 1, 0}, -10.0, 1.0);
    EXPECT_EQ(s.speed, 0.0);
    EXPECT_EQ(s.distance, 1.0);
}

TEST(Integrate, Coasting) {
    const auto s = integrate(BodyState{36, 0, 0}, 0.0, 2.0);
    EXPECT_EQ(s.speed, 36.0);
    EXPECT_NEAR(s.distance, 0.02, 1e-15);
}

TEST(ResolveForces, StandstillHolds) {
    const VehicleBodyParams b;
    const auto f = resolve_forces(100.0, 0, 500, b, 0.0, 0.1);
    EXPECT_EQ(f.net, 0.0);
    EXPECT_EQ(f.rolling, 0.0);
    const auto go = resolve_forces(3498.6, 0, 0, b, 0.0, 0.1);
    EXPECT_EQ(go.net, 3498.6);
}

TEST(ResolveForces, BrakingStopsExactlyAtRest) {
    const VehicleBodyParams b;
    const auto f = resolve_forces(0, 3000, 800, b, 0.5, 0.1);
    const auto s = integrate(BodyState{0.5, 0, 0}, acceleration(f, b.mass), 0.1);
    EXPECT_NEAR(s.speed, 0.0, 1e-12);
    EXPECT_GE(f.friction_brake, 0.0);
    EXPECT_NEAR(f.net, f.propulsion - f.regen_brake - f.friction_brake - f.rolling - f.aero, 1e-9);
}

TEST(DynamicsProperties, SpeedAndDistanceMonotoneSafe) {
    const VehicleBodyParams b;
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> prop(0, 4000), brake(0, 5000);
    BodyState s;
    for (int i = 0; i < 50000; ++i) {
        const bool drive = (i / 200) % 2 == 0;
        const auto f = resolve_forces(drive ? prop(rng) : 0.0, 0.0, drive ? 0.0 : brake(rng), b, s.speed, 0.1);
        const auto n = integrate(s, acceleration(f, b.mass), 0.1);
        ASSERT_GE(n.speed, 0.0);
        ASSERT_GE(n.distance, s.distance);
        s = n;
    }
}

TEST(DynamicsProperties, ConstantForceConvergesToForceBalance) {
    const VehicleBodyParams b;
    for (double F : {500.0, 900.0, 1500.0}) {
        // Root of F = RR + WR.
        const double rr = rolling_resistance(b, 1);
        const double v_star = std::sqrt((F - rr) * 21.15 / (b.drag_coefficient * b.frontal_area));
        BodyState s;
        for (int i = 0; i < 20000; ++i) {
            const auto f = resolve_forces(F, 0, 0, b, s.speed, 0.1);
            s = integrate(s, acceleration(f, b.mass), 0.1);
        }
        EXPECT_NEAR(s.speed, v_star, 0.5) << F;
    }
}

TEST(DynamicsProperties, HalvingDtIsFirstOrderClose) {
    const VehicleBodyParams b;
    auto final_speed = [&](double dt) {
        BodyState s;
        const int n = static_cast<int>(std::lround(100.0 / dt));
        for (int i = 0; i < n; ++i) {
            const auto f = resolve_forces(1500.0, 0, 0, b, s.speed, dt);
            s = integrate(s, acceleration(f, b.mass), dt);
        }
        return s.speed;
    };
    const double a = final_speed(0.1), c = final_speed(0.05);
    EXPECT_LT(std::abs(a - c) / c, 1e-3);
}
