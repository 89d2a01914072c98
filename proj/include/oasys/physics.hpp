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

#pragma once

#include "oasys/geometry.hpp"

namespace oasys {

// Horizontal water velocity, linear in depth between a surface and a deep value.
// With deep == surface (the default) the field is uniform.
struct CurrentField {
    Vec2 surface{};
    Vec2 deep{};
    double reference_depth = 200.0;  // depth at which `deep` applies, m
    double max_speed = 0.5;          // m/s

    Vec2 at(const Vec2& position, double depth) const;
    static CurrentField uniform(Vec2 v, double max_speed = 0.5) { return {v, v, 200.0, max_speed}; }
};

struct Environment {
    double water_density = 1025.0;       // kg/m^3
    double gravity = 9.81;               // m/s^2
    double surface_pressure = 101325.0;  // Pa
    CurrentField current{};
    double solar_peak = 50.0;    // W
    double day_length = 86400.0; // s

    void validate() const;
};

struct MugBody {
    double mass = 2.6;             // kg
    double hull_volume = 0.0;      // m^3, displacement at neutral trim; set by calibrate_trim()
    double frontal_area = 0.0;     // m^2
    double drag_coefficient = 1.0;
    double length = 0.56;          // m
    double diameter = 0.07;        // m
    double added_mass_fraction = 0.1;

    static MugBody with_diameter(double mass, double diameter, double length, double drag_coefficient);
    double effective_mass() const { return mass * (1.0 + added_mass_fraction); }
    void validate() const;
};

struct VbsState {
    double piston_fraction = 0.5;  // 0 = retracted, minimum displaced volume
    double piston_rate = 0.0;      // fraction/s
    double max_displaced_volume = 100e-6;  // m^3
    double stroke_length = 0.20;           // m
    double piston_area = 5.0e-4;           // m^2

    void validate(double max_rate) const;
};

struct MugKinematics {
    double depth = 0.0;              // m, positive down
    double vertical_velocity = 0.0;  // m/s, positive down
    Vec2 position{};
    Vec2 horizontal_velocity{};
    double pitch = 0.0;  // rad

    bool submerged() const { return depth > 0.0; }
};

struct GlideCommand {
    double pitch = 0.0;        // rad, |pitch| <= 45 deg
    double glide_ratio = 0.0;  // horizontal / vertical speed
    double heading = 0.0;      // rad, clockwise from north
};

// Absolute pressure at depth. Throws std::domain_error on negative depth.
double hydrostatic_pressure(double depth, const Environment& env);
double gauge_pressure(double depth, const Environment& env);

// Hull displacement that makes the body neutrally buoyant with the piston at
// `neutral_fraction`. The trim is calibrated from mass, not from geometry.
double calibrate_hull_volume(const MugBody& body, const VbsState& vbs, const Environment& env,
                             double neutral_fraction);

// Net vertical force, positive up.
double net_buoyant_force(const VbsState& vbs, const MugBody& body, const Environment& env,
                         double neutral_fraction);

// One step of drag-opposed point-mass dynamics along the vertical. Depth is
// positive down so an upward force decelerates a descent. Quadratic drag is
// linearised about the current velocity and treated implicitly, which keeps
// the update stable over the allowed 0 < dt <= 10 s range. Surfacing clamps
// depth to zero and absorbs the vertical momentum.
MugKinematics vertical_step(const MugKinematics& kin, double force_up, const MugBody& body,
                            const Environment& env, double dt);

// Steady-glide horizontal kinematics plus current advection over dt.
MugKinematics glide_step(const MugKinematics& kin, const GlideCommand& glide, const Environment& env,
                         double dt);

// Closed form |v| at which drag balances |force|.
double terminal_speed(double force, const MugBody& body, const Environment& env);

}  // namespace oasys
