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

#include "oasys/powertrain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oasys {

void MotorModel::validate() const {
    if (!(current_limit > no_load_current)) throw std::invalid_argument("motor current_limit must exceed no_load_current");
    if (!(drivetrain_efficiency > 0.0 && drivetrain_efficiency <= 1.0))
        throw std::invalid_argument("motor drivetrain_efficiency must be in (0, 1]");
    if (!(oil_current_multiplier >= 1.0)) throw std::invalid_argument("motor oil_current_multiplier must be >= 1");
    if (!(bus_voltage_nominal > 0.0)) throw std::invalid_argument("motor bus_voltage must be > 0");
    if (!(max_piston_speed > 0.0)) throw std::invalid_argument("motor max_piston_speed must be > 0");
    if (no_load_current < 0.0) throw std::invalid_argument("motor no_load_current must be >= 0");
}

MotorDraw motor_current(double load_force, double piston_speed, Medium medium, const MotorModel& model) {
    if (load_force < 0.0) throw std::invalid_argument("motor_current: negative load");
    if (piston_speed < 0.0 || piston_speed > model.max_piston_speed * (1.0 + 1e-12))
        throw std::invalid_argument("motor_current: piston speed outside [0, max]");

    const double k = medium == Medium::Oil ? model.oil_current_multiplier : 1.0;
    const double per_speed = load_force / (model.drivetrain_efficiency * model.bus_voltage_nominal);
    const double demanded = k * (model.no_load_current + per_speed * piston_speed);
    if (demanded <= model.current_limit) return {demanded, piston_speed, false};

    // Solve k * (i0 + per_speed * s) = limit for s.
    double speed = 0.0;
    if (per_speed > 0.0) speed = std::max(0.0, (model.current_limit / k - model.no_load_current) / per_speed);
    return {model.current_limit, std::min(speed, piston_speed), true};
}

double vbs_stroke_energy(double depth, double delta_fraction, const MotorModel& model, const VbsState& vbs,
                         const Environment& env) {
    if (std::abs(delta_fraction) > 1.0 + 1e-12) throw std::invalid_argument("vbs_stroke_energy: |delta| > 1");
    if (delta_fraction == 0.0) return 0.0;

    const bool pumping_out = delta_fraction > 0.0;
    const double p_gauge = gauge_pressure(depth, env);
    const double load = pumping_out ? p_gauge * vbs.piston_area : 0.0;
    const MotorDraw draw = motor_current(load, model.max_piston_speed, Medium::Oil, model);
    const double travel = std::abs(delta_fraction) * vbs.stroke_length;

    double joules = 0.0;
    if (pumping_out) joules += p_gauge * delta_fraction * vbs.max_displaced_volume / model.drivetrain_efficiency;
    if (draw.achieved_speed > 0.0) {
        const double duration = travel / draw.achieved_speed;
        joules += model.no_load_current * model.bus_voltage_nominal * duration;
    }
    return joules / kJoulesPerWh;
}

EnergyStore EnergyStore::make(double capacity, double charge, double voltage, double reserve_floor) {
    EnergyStore s;
    s.capacity = capacity;
    s.charge = charge;
    s.initial = charge;
    s.voltage_nominal = voltage;
    s.reserve_floor = reserve_floor;
    return s;
}

void EnergyStore::validate() const {
    if (!(capacity > 0.0)) throw std::invalid_argument("battery capacity must be > 0");
    if (charge < 0.0 || charge > capacity) throw std::invalid_argument("battery charge must be in [0, capacity]");
    if (reserve_floor < 0.0 || reserve_floor > capacity)
        throw std::invalid_argument("battery reserve floor must be in [0, capacity]");
}

BatteryStep battery_step(const EnergyStore& store, double net_power, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("battery_step: dt must be > 0");
    BatteryStep r;
    r.store = store;
    const double requested = -net_power * dt / kJoulesPerWh;  // + charges
    const double target = store.charge + requested;
    const double clamped = std::clamp(target, 0.0, store.capacity);
    const double applied = clamped - store.charge;

    r.applied_wh = applied;
    if (target > store.capacity) r.curtailed_wh = target - store.capacity;
    if (target < 0.0) r.shortfall_wh = -target;
    if (applied >= 0.0)
        r.store.cumulative_in += applied;
    else
        r.store.cumulative_out += -applied;
    r.store.charge = clamped;
    r.low = clamped < store.reserve_floor;
    r.depleted = net_power > 0.0 && clamped <= 0.0;
    return r;
}

double solar_harvest(double time_of_day, const Environment& env) {
    return std::max(0.0, env.solar_peak * std::sin(2.0 * std::numbers::pi * time_of_day / env.day_length));
}

void UavPowerModel::validate() const {
    if (!(hover_power > 0.0 && cruise_power > 0.0 && cruise_speed > 0.0 && recharge_power > 0.0))
        throw std::invalid_argument("uav powers and cruise speed must be > 0");
    if (payload_power_multiplier < 1.0) throw std::invalid_argument("uav payload_power_multiplier must be >= 1");
    battery.validate();
}

double uav_leg_energy(double distance, double hover_time, bool carrying_payload, const UavPowerModel& model) {
    if (distance < 0.0 || hover_time < 0.0) throw std::invalid_argument("uav_leg_energy: negative input");
    const double joules = model.cruise_power * (distance / model.cruise_speed) + model.hover_power * hover_time;
    return joules * (carrying_payload ? model.payload_power_multiplier : 1.0) / kJoulesPerWh;
}

}  // namespace oasys
