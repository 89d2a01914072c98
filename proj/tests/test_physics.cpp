/*
 * Copyright 2026 The OASYS Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oasys/physics.hpp"
#include "support.hpp"

using namespace oasys;
using oasys::testing::Gen;

namespace {

MugBody calibrated_body(const Environment& env, double cd = 1.0, double neutral = 0.5) {
    MugBody b = MugBody::with_diameter(2.6, 0.07, 0.56, cd);
    b.hull_volume = calibrate_hull_volume(b, VbsState{}, env, neutral);
    return b;
}

}  // namespace

TEST(Pressure, SurfaceIsAtmospheric) {
    EXPECT_DOUBLE_EQ(hydrostatic_pressure(0.0, Environment{}), 101325.0);
}

TEST(Pressure, TwoHundredMetres) {
    const Environment env;
    // rho * g * h by hand: 1025 * 9.81 * 200
    EXPECT_NEAR(hydrostatic_pressure(200.0, env), 2112375.0, 1e-6);
    EXPECT_NEAR(gauge_pressure(200.0, env) / 1e5, 20.1105, 1e-9);
}

TEST(Pressure, GaugeIsLinear) {
    const Environment env;
    EXPECT_NEAR(gauge_pressure(100.0, env) * 2.0, gauge_pressure(200.0, env), 1e-6);
}

TEST(Pressure, NegativeDepthThrows) {
    EXPECT_THROW(hydrostatic_pressure(-0.1, Environment{}), std::domain_error);
}

TEST(Pressure, StrictlyIncreasingProperty) {
    const Environment env;
    Gen g(11);
    for (int i = 0; i < 2000; ++i) {
        const double a = g.uniform(0.0, 300.0);
        const double b = a + g.uniform(1e-6, 50.0);
        ASSERT_LT(hydrostatic_pressure(a, env), hydrostatic_pressure(b, env)) << "a=" << a << " b=" << b;
    }
}

TEST(Buoyancy, NeutralTrimIsZero) {
    const Environment env;
    Gen g(5);
    for (int i = 0; i < 200; ++i) {
        const double neutral = g.uniform(0.0, 1.0);
        const MugBody body = calibrated_body(env, 1.0, neutral);
        VbsState v;
        v.piston_fraction = neutral;
        ASSERT_NEAR(net_buoyant_force(v, body, env, neutral), 0.0, 1e-9) << "neutral=" << neutral;
    }
}

TEST(Buoyancy, HalfStrokeForce) {
    const Environment env;
    const MugBody body = calibrated_body(env);
    VbsState v;
    v.piston_fraction = 1.0;
    const double expected = 1025.0 * 9.81 * 0.5 * 100e-6;
    EXPECT_NEAR(net_buoyant_force(v, body, env, 0.5), expected, 1e-9);
    EXPECT_NEAR(expected, 0.503, 5e-4);
    v.piston_fraction = 0.0;
    EXPECT_NEAR(net_buoyant_force(v, body, env, 0.5), -expected, 1e-9);
}

TEST(Buoyancy, ForceSwingEqualsDisplacedWeight) {
    const Environment env;
    Gen g(9);
    for (int i = 0; i < 500; ++i) {
        const double neutral = g.uniform(0.0, 1.0);
        const MugBody body = calibrated_body(env, 1.0, neutral);
        VbsState lo, hi;
        lo.piston_fraction = 0.0;
        hi.piston_fraction = 1.0;
        const double swing = net_buoyant_force(hi, body, env, neutral) - net_buoyant_force(lo, body, env, neutral);
        const double oracle = env.water_density * env.gravity * lo.max_displaced_volume;
        ASSERT_NEAR(swing / oracle, 1.0, 1e-6);
    }
}

TEST(VerticalStep, EquilibriumStaysPut) {
    const Environment env;
    const MugBody body = calibrated_body(env);
    MugKinematics k;
    k.depth = 50.0;
    const MugKinematics out = vertical_step(k, 0.0, body, env, 1.0);
    EXPECT_EQ(out.depth, 50.0);
    EXPECT_EQ(out.vertical_velocity, 0.0);
}

TEST(VerticalStep, RejectsBadDt) {
    const Environment env;
    const MugBody body = calibrated_body(env);
    EXPECT_THROW(vertical_step({}, 0.0, body, env, 0.0), std::invalid_argument);
    EXPECT_THROW(vertical_step({}, 0.0, body, env, 10.5), std::invalid_argument);
}

TEST(VerticalStep, ConvergesToTerminalSpeed) {
    const Environment env;
    const MugBody body = calibrated_body(env);
    const double force = -1.006;
    // Closed form, written out independently of the library.
    const double area = std::numbers::pi * 0.035 * 0.035;
    const double oracle = std::sqrt(2.0 * 1.006 / (1025.0 * 1.0 * area));
    EXPECT_NEAR(oracle, 0.714, 1e-3);
    EXPECT_NEAR(terminal_speed(force, body, env), oracle, 1e-12);

    MugKinematics k;
    k.depth = 1.0;
    for (int i = 0; i < 600; ++i) k = vertical_step(k, force, body, env, 1.0);
    EXPECT_NEAR(k.vertical_velocity / oracle, 1.0, 0.01);
}

TEST(VerticalStep, SelfConvergenceUnderDtHalving) {
    const Environment env;
    const MugBody body = calibrated_body(env);
    auto descend = [&](double dt) {
        MugKinematics k;
        k.depth = 0.5;
        const int n = static_cast<int>(std::lround(600.0 / dt));
        for (int i = 0; i < n; ++i) k = vertical_step(k, -0.5, body, env, dt);
        return k.depth;
    };
    const double d1 = descend(1.0), d2 = descend(0.5), d4 = descend(0.25);
    EXPECT_LT(std::abs(d1 - d2) / d2, 0.005);
    // First order or better: errors shrink at least by ~2x per halving.
    EXPECT_LT(std::abs(d2 - d4), 0.6 * std::abs(d1 - d2) + 1e-9);
}

TEST(VerticalStep, SurfaceClampAbsorbsMomentum) {
    const Environment env;
    const MugBody body = calibrated_body(env);
    MugKinematics k;
    k.depth = 0.2;
    k.vertical_velocity = -0.5;
    const MugKinematics out = vertical_step(k, 0.5, body, env, 1.0);
    EXPECT_EQ(out.depth, 0.0);
    EXPECT_EQ(out.vertical_velocity, 0.0);
}

TEST(VerticalStep, SurfacedNeutralMugStays) {
    const Environment env;
    const MugBody body = calibrated_body(env);
    MugKinematics k;
    for (int i = 0; i < 10000; ++i) k = vertical_step(k, 0.0, body, env, 1.0);
    EXPECT_EQ(k.depth, 0.0);
}

TEST(TerminalSpeed, MonotoneInForceProperty) {
    const Environment env;
    const MugBody body = calibrated_body(env);
    Gen g(21);
    for (int i = 0; i < 1000; ++i) {
        const double a = g.uniform(0.0, 2.0);
        const double b = a + g.uniform(1e-6, 1.0);
        ASSERT_LT(terminal_speed(a, body, env), terminal_speed(b, body, env));
    }
}

TEST(Glide, PureProfilerOnlyDrifts) {
    Environment env;
    env.current = CurrentField::uniform({0.3, 0.0});
    MugKinematics k;
    k.depth = 10.0;
    k.vertical_velocity = 0.2;
    for (int i = 0; i < 3600; ++i) k = glide_step(k, GlideCommand{}, env, 1.0);
    EXPECT_NEAR(k.position.east, 1080.0, 1e-6);
    EXPECT_NEAR(k.position.north, 0.0, 1e-9);
}

TEST(Glide, HorizontalSpeedIsRatioTimesVertical) {
    const Environment env;
    MugKinematics k;
    k.vertical_velocity = 0.2;
    GlideCommand g;
    g.glide_ratio = 2.0;
    g.heading = std::numbers::pi / 2.0;  // east
    const MugKinematics out = glide_step(k, g, env, 1.0);
    EXPECT_NEAR(out.horizontal_velocity.norm(), 0.4, 1e-12);
    EXPECT_NEAR(out.position.east, 0.4, 1e-12);
}

TEST(Glide, ZeroVerticalVelocityMeansNoGlide) {
    const Environment env;
    GlideCommand g;
    g.glide_ratio = 3.0;
    const MugKinematics out = glide_step(MugKinematics{}, g, env, 1.0);
    EXPECT_EQ(out.horizontal_velocity.norm(), 0.0);
}

TEST(Glide, RejectsSteepPitch) {
    GlideCommand g;
    g.pitch = 0.8;
    EXPECT_THROW(glide_step(MugKinematics{}, g, Environment{}, 1.0), std::invalid_argument);
}

TEST(Current, LinearInDepth) {
    CurrentField c;
    c.surface = {0.2, 0.0};
    c.deep = {0.0, 0.1};
    c.reference_depth = 200.0;
    const Vec2 mid = c.at({}, 100.0);
    EXPECT_NEAR(mid.east, 0.1, 1e-12);
    EXPECT_NEAR(mid.north, 0.05, 1e-12);
    EXPECT_EQ(c.at({}, 500.0), c.deep);
}
