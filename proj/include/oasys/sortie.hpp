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

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "oasys/geometry.hpp"

namespace oasys {

enum class SortieObjective { Recover, Deploy, Relay };
std::string_view to_string(SortieObjective objective);

struct SortiePlan {
    std::uint64_t plan_id = 0;
    std::string uav_id;
    SortieObjective objective = SortieObjective::Recover;
    std::string mug_id;      // Recover / Deploy
    Vec2 station{};          // pickup, drop or loiter point
    double relay_duration = 0.0;  // s, Relay only
    double relay_altitude = 50.0; // m, Relay only
    std::vector<Vec2> legs;  // launch point, station, predicted return point
    double energy_estimate = 0.0;  // Wh, without reserve
    double reserve_fraction = 0.2;
    double launch_time = 0.0;
    double duration_estimate = 0.0;  // s
    double search_sigma = 0.0;       // m, position uncertainty at the station
    bool enforce_reserve = true;     // abort outbound phases to protect the reserve

    double reserve_wh() const { return reserve_fraction * energy_estimate; }
    // Charge kept back in flight: the reserve, but never less than the UAV's emergency floor.
    double protected_wh(double emergency_floor) const { return std::max(reserve_wh(), emergency_floor); }
    double required_wh(double emergency_floor) const { return energy_estimate + protected_wh(emergency_floor); }
};

}  // namespace oasys
