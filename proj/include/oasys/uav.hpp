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
#include <string_view>
#include <vector>

#include "oasys/messages.hpp"
#include "oasys/physics.hpp"
#include "oasys/powertrain.hpp"
#include "oasys/sortie.hpp"

namespace oasys {

enum class UavMode { DockedCharging, TransitOut, HoverPickup, TransitBack, RelayLoiter, EmergencyLand };

enum class UavEvent {
    Launch,
    ArrivedAtPickup,
    ArrivedAtStation,
    PickupComplete,
    ReleaseComplete,
    PickupFailed,
    LoiterComplete,
    Abort,
    Docked,
    EmergencyFloor,
};

inline constexpr UavMode kAllUavModes[] = {UavMode::DockedCharging, UavMode::TransitOut,  UavMode::HoverPickup,
                                           UavMode::TransitBack,    UavMode::RelayLoiter, UavMode::EmergencyLand};
inline constexpr UavEvent kAllUavEvents[] = {
    UavEvent::Launch,          UavEvent::ArrivedAtPickup, UavEvent::ArrivedAtStation, UavEvent::PickupComplete,
    UavEvent::ReleaseComplete, UavEvent::PickupFailed,    UavEvent::LoiterComplete,   UavEvent::Abort,
    UavEvent::Docked,          UavEvent::EmergencyFloor,
};

std::string_view to_string(UavMode mode);
std::string_view to_string(UavEvent event);

struct UavTransition {
    UavMode from;
    UavEvent event;
    UavMode to;
};

const std::vector<UavTransition>& uav_transition_table();
UavMode uav_transition(UavMode mode, UavEvent event);

struct UavParams {
    UavPowerModel power{};
    double capture_radius = 20.0;  // m
    double pickup_time = 60.0;     // s
    double release_time = 30.0;    // s
    double relay_altitude = 50.0;  // m
    double cruise_altitude = 50.0; // m
    double deck_height = 2.0;      // m, antenna height while docked
    double hover_altitude = 2.0;   // m, during pickup/release
    double dock_radius = 5.0;      // m
    double emergency_floor_fraction = 0.05;
    int max_search_legs = 60;

    double emergency_floor() const { return emergency_floor_fraction * power.battery.capacity; }
    void validate() const;
};

// Expanding-square pattern around a centre: legs L, L, 2L, 2L, 3L, ...
// heading north, east, south, west in turn.
struct SearchState {
    bool active = false;
    Vec2 center{};
    double leg_length = 0.0;
    int leg_index = 0;
};

// Waypoint `k` of the expanding square (k = 0 is the centre).
Vec2 expanding_square_point(const Vec2& center, double leg_length, int k);

struct UavAgent {
    std::string id;
    UavParams params;
    Vec2 position{};
    double altitude = 2.0;
    UavMode mode = UavMode::DockedCharging;
    double mode_since = 0.0;
    EnergyStore battery{};
    std::optional<SortiePlan> sortie;
    std::optional<std::string> carrying;        // recovered MUG
    std::optional<std::string> deploy_payload;  // MUG being taken to its drop point
    Vec2 target{};                              // current steering point
    SearchState search{};
    std::optional<double> hover_complete_at;
    double search_distance = 0.0;
    double next_report_at = 0.0;
};

UavAgent make_uav(const std::string& id, const UavParams& params, const Vec2& dock_position);

// What the UAV can perceive of its sortie's MUG this tick.
struct MugSighting {
    std::string mug_id;
    Vec2 true_position{};
    bool awaiting_pickup = false;  // surfaced and in WAIT_RECOVERY
    std::optional<Vec2> broadcast_estimate;  // heard over RF this tick
};

struct UavContext {
    const Environment& env;
    double now = 0.0;
    double dt = 1.0;
    Vec2 usv_position{};
    double usv_speed = 0.0;
    std::optional<MugSighting> mug;
};

struct UavModeChange {
    UavMode from;
    UavMode to;
    UavEvent event;
    double time;
};

struct UavTickResult {
    UavAgent agent;
    std::vector<UavModeChange> changes;
    std::vector<VehicleReport> reports;
    double consumed_wh = 0.0;
    double shortfall_wh = 0.0;
    double requested_charge_power = 0.0;  // W, docked and not full
    std::optional<double> schedule_hover_completion;  // absolute time
    bool pickup_failed = false;
    bool aborted = false;
    bool emergency_landed = false;
    bool docked_now = false;
    std::optional<std::string> delivered_mug;   // carried MUG handed to the USV bay
    std::optional<SortiePlan> completed_sortie; // set on the tick the UAV docks
};

void fire(UavAgent& agent, UavEvent event, double now, std::vector<UavModeChange>* changes);

// Starts a sortie from the dock. Throws std::logic_error when not docked.
void launch(UavAgent& agent, const SortiePlan& plan, double now, std::vector<UavModeChange>* changes);

// Energy to fly home from `from` while the USV keeps moving.
double return_energy(const UavAgent& agent, const Vec2& from, const Vec2& usv, double usv_speed, bool loaded);

UavTickResult uav_tick(const UavAgent& agent, const UavContext& ctx);

// Ends a timed hover: a recovery attaches the MUG, a deployment releases it.
// Returns the MUG involved, or nothing if the UAV is no longer hovering.
std::optional<std::string> complete_hover(UavAgent& agent, double now, std::vector<UavModeChange>* changes);

bool apply_uav_command(UavAgent& agent, const OperatorCommand& cmd, double now, std::vector<UavModeChange>* changes);

VehicleReport make_report(const UavAgent& agent, double now);

}  // namespace oasys
