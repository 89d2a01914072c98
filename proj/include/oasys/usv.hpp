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

#include <optional>
#include <string>
#include <vector>

#include "oasys/messages.hpp"
#include "oasys/physics.hpp"
#include "oasys/powertrain.hpp"

namespace oasys {

struct UsvParams {
    double speed = 1.0;         // m/s along track
    double hotel_power = 5.0;   // W
    double mast_height = 2.0;   // m
    double dock_reserve_fraction = 0.1;  // dock stops charging below this share of capacity
    EnergyStore battery = EnergyStore::make(2000.0, 1000.0, 24.0, 0.0);

    void validate() const;
};

struct UsvAgent {
    std::string id;
    UsvParams params;
    Vec2 position{};
    std::vector<Vec2> track;  // cyclic waypoints; empty means station keeping
    std::size_t waypoint = 0;
    EnergyStore battery{};
    std::optional<std::string> dock_occupant;  // UAV charging this tick
    std::vector<std::string> mug_bay;
};

UsvAgent make_usv(const std::string& id, const UsvParams& params, const Vec2& position, std::vector<Vec2> track);

struct UsvTickResult {
    UsvAgent agent;
    double harvested_wh = 0.0;  // applied to the store
    double curtailed_wh = 0.0;
    double consumed_wh = 0.0;
    double shortfall_wh = 0.0;
};

// Track following plus solar and hotel accounting. Dock transfers are
// applied separately by the engine.
UsvTickResult usv_tick(const UsvAgent& agent, const Environment& env, double now, double dt);

// Position after `ahead` seconds of track following.
Vec2 predict_usv_position(const UsvAgent& agent, double ahead);

struct DockTransfer {
    EnergyStore usv;
    EnergyStore uav;
    double transferred_wh = 0.0;
};

// Moves up to `power` * dt from the USV store into the UAV store, limited by
// UAV headroom and the USV dock reserve.
DockTransfer dock_transfer(const EnergyStore& usv, const EnergyStore& uav, double power, double dt,
                           double usv_floor);

bool apply_usv_command(UsvAgent& agent, const OperatorCommand& cmd);

VehicleReport make_report(const UsvAgent& agent, double now);

double time_of_day(double now, const Environment& env);

}  // namespace oasys
