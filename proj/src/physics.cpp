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

#include "oasys/physics.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>

namespace oasys {

namespace {

constexpr double kMaxPitch = std::numbers::pi / 4.0;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

Vec2 CurrentField::at(const Vec2& /*position*/, double depth) const {
    if (reference_depth <= 0.0) return surface;
    const double s = std::clamp(depth / reference_depth, 0.0, 1.0);
    return surface + (deep - surface) * s;
}

void Environment::validate() const {
    require(water_density > 0.0, "environment.water_density must be > 0");
    require(gravity > 0.0, "environment.gravity must be > 0");
    require(surface_pressure > 0.0, "environment.surface_pressure must be > 0");
    require(current.max_speed >= 0.0, "environment.max_current must be >= 0");
    require(current.surface.norm() <= current.max_speed + 1e-12,
            "environment current magnitude exceeds max_current");
    require(current.deep.norm() <= current.max_speed + 1e-12,
            "environment deep current magnitude exceeds max_current");
    require(solar_peak >= 0.0, "environment.solar_peak must be >= 0");
    require(day_length > 0.0, "environment.day_length must be > 0");
}

MugBody MugBody::with_diameter(double mass, double diameter, double length, double drag_coefficient) {
    MugBody b;
    b.mass = mass;
    b.diameter = diameter;
    b.length = length;
    b.drag_coefficient = drag_coefficient;
    b.frontal_area = std::numbers::pi * (diameter / 2.0) * (diameter / 2.0);
    return b;
}

void MugBody::validate() const {
    require(mass > 0.0, "mug.mass must be > 0");
    require(hull_volume > 0.0, "mug hull volume must be > 0 (trim not calibrated)");
    require(drag_coefficient > 0.0 && drag_coefficient < 5.0, "mug.drag_coefficient must be in (0, 5)");
    require(diameter > 0.0 && length > 0.0, "mug.diameter and mug.length must be > 0");
    const double geometric = std::numbers::pi * (diameter / 2.0) * (diameter / 2.0);
    require(std::abs(frontal_area - geometric) <= 0.01 * geometric,
            "mug frontal area inconsistent with diameter");
    require(added_mass_fraction >= 0.0, "mug.added_mass_fraction must be >= 0");
}

void VbsState::validate(double max_rate) const {
    require(piston_fraction >= 0.0 && piston_fraction <= 1.0, "piston fraction must be in [0, 1]");
    require(max_displaced_volume > 0.0, "mug.max_displaced_volume must be > 0");
    require(stroke_length > 0.0 && piston_area > 0.0, "mug piston geometry must be positive");
    require(std::abs(piston_area * stroke_length - max_displaced_volume) <= 0.01 * max_displaced_volume,
            "mug piston_area * stroke_length must equal max_displaced_volume within 1%");
    require(std::abs(piston_rate) <= max_rate + 1e-12, "piston rate exceeds mechanical maximum");
}

double hydrostatic_pressure(double depth, const Environment& env) {
    if (depth < 0.0) throw std::domain_error("hydrostatic_pressure: negative depth");
    return env.surface_pressure + env.water_density * env.gravity * depth;
}

double gauge_pressure(double depth, const Environment& env) {
    return hydrostatic_pressure(depth, env) - env.surface_pressure;
}

double calibrate_hull_volume(const MugBody& body, const VbsState& /*vbs*/, const Environment& env,
                             double /*neutral_fraction*/) {
    // At neutral the piston term vanishes, leaving rho * V_hull = m.
    return body.mass / env.water_density;
}

double net_buoyant_force(const VbsState& vbs, const MugBody& body, const Environment& env,
                         double neutral_fraction) {
    const double volume =
        body.hull_volume + (vbs.piston_fraction - neutral_fraction) * vbs.max_displaced_volume;
    return env.water_density * env.gravity * volume - body.mass * env.gravity;
}

MugKinematics vertical_step(const MugKinematics& kin, double force_up, const MugBody& body,
                            const Environment& env, double dt) {
    if (!(dt > 0.0 && dt <= 10.0)) throw std::invalid_argument("vertical_step: dt must be in (0, 10]");
    const double m = body.effective_mass();
    const double c = 0.5 * env.water_density * body.drag_coefficient * body.frontal_area;
    const double v = kin.vertical_velocity;

    MugKinematics out = kin;
    out.vertical_velocity = (v - dt * force_up / m) / (1.0 + dt * c * std::abs(v) / m);
    out.depth = kin.depth + dt * out.vertical_velocity;
    if (out.depth <= 0.0) {
        out.depth = 0.0;
        out.vertical_velocity = 0.0;
    }
    return out;
}

MugKinematics glide_step(const MugKinematics& kin, const GlideCommand& glide, const Environment& env,
                         double dt) {
    if (std::abs(glide.pitch) > kMaxPitch + 1e-12) throw std::invalid_argument("glide_step: |pitch| > 45 deg");
    if (glide.glide_ratio < 0.0) throw std::invalid_argument("glide_step: negative glide ratio");

    MugKinematics out = kin;
    out.pitch = glide.pitch;
    const double speed = glide.glide_ratio * std::abs(kin.vertical_velocity);
    const Vec2 through_water{speed * std::sin(glide.heading), speed * std::cos(glide.heading)};
    out.horizontal_velocity = through_water + env.current.at(kin.position, kin.depth);
    out.position += out.horizontal_velocity * dt;
    return out;
}

double terminal_speed(double force, const MugBody& body, const Environment& env) {
    const double c = 0.5 * env.water_density * body.drag_coefficient * body.frontal_area;
    return std::sqrt(std::abs(force) / c);
}

}  // namespace oasys
