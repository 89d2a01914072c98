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

#include "oasys/physics.hpp"

namespace oasys {

enum class Medium { Air, Oil };

struct MotorModel {
    double current_limit = 0.5;           // A, continuous rating
    double oil_current_multiplier = 5.0;  // oil immersion penalty on total current
    double bus_voltage_nominal = 25.2;    // V
    double drivetrain_efficiency = 0.3;
    double no_load_current = 0.02;  // A
    double max_piston_speed = 2e-3; // m/s

    void validate() const;
};

struct MotorDraw {
    double current = 0.0;         // A
    double achieved_speed = 0.0;  // m/s
    bool saturated = false;
};

// Current demanded to drive the piston at `piston_speed` against `load_force`.
// When the demand exceeds the continuous rating the piston slows until the
// demand equals the limit.
MotorDraw motor_current(double load_force, double piston_speed, Medium medium, const MotorModel& model);

// Electrical energy (Wh) of moving the piston by `delta_fraction` of its
// stroke at `depth`. Pumping out works against gauge pressure; retracting
// costs only the no-load overhead for the stroke duration.
double vbs_stroke_energy(double depth, double delta_fraction, const MotorModel& model, const VbsState& vbs,
                         const Environment& env);

struct EnergyStore {
    double capacity = 88.2;   // Wh
    double charge = 88.2;     // Wh
    double voltage_nominal = 25.2;
    double reserve_floor = 0.0;  // Wh
    double cumulative_in = 0.0;  // Wh
    double cumulative_out = 0.0; // Wh
    double initial = 88.2;       // Wh, charge when the ledger was opened

    static EnergyStore make(double capacity, double charge, double voltage, double reserve_floor);
    double ledger_residual() const { return charge - (initial + cumulative_in - cumulative_out); }
    void validate() const;
};

struct BatteryStep {
    EnergyStore store;
    double applied_wh = 0.0;     // signed: + into the store, - out of it
    double curtailed_wh = 0.0;   // charge refused at capacity
    double shortfall_wh = 0.0;   // draw that could not be served
    bool low = false;            // below reserve floor after the step
    bool depleted = false;       // empty after the step with unmet or zeroing draw
};

// net_power > 0 draws from the store, < 0 charges it.
BatteryStep battery_step(const EnergyStore& store, double net_power, double dt);

// Positive half-sine daylight model.
double solar_harvest(double time_of_day, const Environment& env);

struct UavPowerModel {
    double hover_power = 350.0;   // W
    double cruise_power = 250.0;  // W
    double cruise_speed = 10.0;   // m/s
    double payload_power_multiplier = 1.3;
    double recharge_power = 60.0; // W
    EnergyStore battery = EnergyStore::make(100.0, 100.0, 22.2, 0.0);

    void validate() const;
};

double uav_leg_energy(double distance, double hover_time, bool carrying_payload, const UavPowerModel& model);

constexpr double kJoulesPerWh = 3600.0;

}  // namespace oasys
