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

#include "oasys/usv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oasys {

void UsvParams::validate() const {
    if (speed < 0.0) throw std::invalid_argument("usv.speed must be >= 0");
    if (hotel_power < 0.0) throw std::invalid_argument("usv.hotel_power must be >= 0");
    if (!(mast_height > 0.0)) throw std::invalid_argument("usv.mast_height must be > 0");
    if (dock_reserve_fraction < 0.0 || dock_reserve_fraction >= 1.0)
        throw std::invalid_argument("usv.dock_reserve_fraction must be in [0, 1)");
    battery.validate();
}

UsvAgent make_usv(const std::string& id, const UsvParams& params, const Vec2& position, std::vector<Vec2> track) {
    UsvAgent a;
    a.id = id;
    a.params = params;
    a.position = position;
    a.track = std::move(track);
    a.battery = params.battery;
    return a;
}

namespace {

// Advances along the cyclic track by `travel` metres.
void follow_track(Vec2& position, std::size_t& waypoint, const std::vector<Vec2>& track, double travel) {
    if (track.empty()) return;
    // Bound the loop for degenerate tracks with all waypoints coincident.
    for (std::size_t guard = 0; travel > 0.0 && guard < 4 * track.size() + 4; ++guard) {
        const Vec2& wp = track[waypoint % track.size()];
        const double d = distance(position, wp);
        if (d <= travel) {
            position = wp;
            travel -= d;
            waypoint = (waypoint + 1) % track.size();
        } else {
            position = move_toward(position, wp, travel);
            travel = 0.0;
        }
    }
}

}  // namespace

double time_of_day(double now, const Environment& env) {
    const double t = std::fmod(now, env.day_length);
    return t < 0.0 ? t + env.day_length : t;
}

UsvTickResult usv_tick(const UsvAgent& agent, const Environment& env, double now, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("usv_tick: dt must be > 0");
    UsvTickResult r;
    r.agent = agent;
    UsvAgent& a = r.agent;
    follow_track(a.position, a.waypoint, a.track, a.params.speed * dt);

    const BatteryStep draw = battery_step(a.battery, a.params.hotel_power, dt);
    a.battery = draw.store;
    r.consumed_wh = -draw.applied_wh;
    r.shortfall_wh = draw.shortfall_wh;

    const double solar = solar_harvest(time_of_day(now, env), env);
    if (solar > 0.0) {
        const BatteryStep charge = battery_step(a.battery, -solar, dt);
        a.battery = charge.store;
        r.harvested_wh = charge.applied_wh;
        r.curtailed_wh = charge.curtailed_wh;
    }
    return r;
}

Vec2 predict_usv_position(const UsvAgent& agent, double ahead) {
    Vec2 p = agent.position;
    std::size_t wp = agent.waypoint;
    follow_track(p, wp, agent.track, agent.params.speed * std::max(0.0, ahead));
    return p;
}

DockTransfer dock_transfer(const EnergyStore& usv, const EnergyStore& uav, double power, double dt,
                           double usv_floor) {
    DockTransfer t{usv, uav};
    const double want = power * dt / kJoulesPerWh;
    const double amount = std::max(0.0, std::min({want, uav.capacity - uav.charge, usv.charge - usv_floor}));
    if (amount <= 0.0) return t;
    const double watts = amount * kJoulesPerWh / dt;
    t.usv = battery_step(usv, watts, dt).store;
    t.uav = battery_step(uav, -watts, dt).store;
    t.transferred_wh = amount;
    return t;
}

bool apply_usv_command(UsvAgent& agent, const OperatorCommand& cmd) {
    if (cmd.verb != CommandVerb::RetaskUsvTrack) return false;
    agent.track = cmd.track;
    agent.waypoint = 0;
    return true;
}

VehicleReport make_report(const UsvAgent& a, double now) {
    VehicleReport r;
    r.vehicle_id = a.id;
    r.vehicle_type = "usv";
    r.mode = a.track.empty() ? "STATION_KEEPING" : "TRACK_FOLLOWING";
    r.position_estimate = a.position;
    r.altitude = a.params.mast_height;
    r.battery_wh = a.battery.charge;
    r.task = a.track.empty() ? "station keeping" : "survey track";
    r.sampled_at = now;
    return r;
}

}  // namespace oasys
