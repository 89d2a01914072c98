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

#include "oasys/uav.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oasys {

std::string_view to_string(SortieObjective objective) {
    switch (objective) {
        case SortieObjective::Recover: return "RECOVER";
        case SortieObjective::Deploy: return "DEPLOY";
        case SortieObjective::Relay: return "RELAY";
    }
    return "UNKNOWN";
}

std::string_view to_string(UavMode mode) {
    switch (mode) {
        case UavMode::DockedCharging: return "DOCKED_CHARGING";
        case UavMode::TransitOut: return "TRANSIT_OUT";
        case UavMode::HoverPickup: return "HOVER_PICKUP";
        case UavMode::TransitBack: return "TRANSIT_BACK";
        case UavMode::RelayLoiter: return "RELAY_LOITER";
        case UavMode::EmergencyLand: return "EMERGENCY_LAND";
    }
    return "UNKNOWN";
}

std::string_view to_string(UavEvent event) {
    switch (event) {
        case UavEvent::Launch: return "launch";
        case UavEvent::ArrivedAtPickup: return "arrived_at_pickup";
        case UavEvent::ArrivedAtStation: return "arrived_at_station";
        case UavEvent::PickupComplete: return "pickup_complete";
        case UavEvent::ReleaseComplete: return "release_complete";
        case UavEvent::PickupFailed: return "pickup_failed";
        case UavEvent::LoiterComplete: return "loiter_complete";
        case UavEvent::Abort: return "abort";
        case UavEvent::Docked: return "docked";
        case UavEvent::EmergencyFloor: return "emergency_floor";
    }
    return "unknown";
}

const std::vector<UavTransition>& uav_transition_table() {
    using M = UavMode;
    using E = UavEvent;
    static const std::vector<UavTransition> table{
        {M::DockedCharging, E::Launch, M::TransitOut},
        {M::TransitOut, E::ArrivedAtPickup, M::HoverPickup},
        {M::TransitOut, E::ArrivedAtStation, M::RelayLoiter},
        {M::TransitOut, E::Abort, M::TransitBack},
        {M::TransitOut, E::EmergencyFloor, M::EmergencyLand},
        {M::HoverPickup, E::PickupComplete, M::TransitBack},
        {M::HoverPickup, E::ReleaseComplete, M::TransitBack},
        {M::HoverPickup, E::PickupFailed, M::TransitBack},
        {M::HoverPickup, E::Abort, M::TransitBack},
        {M::HoverPickup, E::EmergencyFloor, M::EmergencyLand},
        {M::RelayLoiter, E::LoiterComplete, M::TransitBack},
        {M::RelayLoiter, E::Abort, M::TransitBack},
        {M::RelayLoiter, E::EmergencyFloor, M::EmergencyLand},
        {M::TransitBack, E::Docked, M::DockedCharging},
        {M::TransitBack, E::EmergencyFloor, M::EmergencyLand},
    };
    return table;
}

UavMode uav_transition(UavMode mode, UavEvent event) {
    for (const UavTransition& t : uav_transition_table())
        if (t.from == mode && t.event == event) return t.to;
    return mode;
}

void UavParams::validate() const {
    power.validate();
    if (!(capture_radius > 0.0)) throw std::invalid_argument("uav.capture_radius must be > 0");
    if (pickup_time < 0.0 || release_time < 0.0) throw std::invalid_argument("uav hover times must be >= 0");
    if (!(relay_altitude > 0.0 && cruise_altitude > 0.0 && deck_height > 0.0 && hover_altitude > 0.0))
        throw std::invalid_argument("uav altitudes must be > 0");
    if (emergency_floor_fraction < 0.0 || emergency_floor_fraction >= 1.0)
        throw std::invalid_argument("uav.emergency_floor_fraction must be in [0, 1)");
}

Vec2 expanding_square_point(const Vec2& center, double leg_length, int k) {
    static constexpr Vec2 kDirs[] = {{0.0, 1.0}, {1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}};
    Vec2 p = center;
    for (int i = 0; i < k; ++i) p += kDirs[i % 4] * (leg_length * static_cast<double>(i / 2 + 1));
    return p;
}

UavAgent make_uav(const std::string& id, const UavParams& params, const Vec2& dock_position) {
    UavAgent a;
    a.id = id;
    a.params = params;
    a.position = dock_position;
    a.altitude = params.deck_height;
    a.battery = params.power.battery;
    a.target = dock_position;
    return a;
}

void fire(UavAgent& agent, UavEvent event, double now, std::vector<UavModeChange>* changes) {
    const UavMode next = uav_transition(agent.mode, event);
    if (next == agent.mode) return;
    if (changes) changes->push_back({agent.mode, next, event, now});
    agent.mode = next;
    agent.mode_since = now;
    agent.hover_complete_at.reset();
    agent.search = {};
    switch (next) {
        case UavMode::HoverPickup: agent.altitude = agent.params.hover_altitude; break;
        case UavMode::RelayLoiter: agent.altitude = agent.sortie ? agent.sortie->relay_altitude : agent.params.relay_altitude; break;
        case UavMode::TransitOut:
        case UavMode::TransitBack: agent.altitude = agent.params.cruise_altitude; break;
        case UavMode::DockedCharging:
            agent.altitude = agent.params.deck_height;
            agent.sortie.reset();
            agent.carrying.reset();
            break;
        case UavMode::EmergencyLand: agent.altitude = 0.0; break;
    }
}

void launch(UavAgent& agent, const SortiePlan& plan, double now, std::vector<UavModeChange>* changes) {
    if (agent.mode != UavMode::DockedCharging) throw std::logic_error("launch: " + agent.id + " is not docked");
    agent.sortie = plan;
    agent.target = plan.station;
    agent.search_distance = 0.0;
    agent.next_report_at = now;
    if (plan.objective == SortieObjective::Deploy) agent.deploy_payload = plan.mug_id;
    fire(agent, UavEvent::Launch, now, changes);
}

double return_energy(const UavAgent& agent, const Vec2& from, const Vec2& usv, double usv_speed, bool loaded) {
    const UavPowerModel& pm = agent.params.power;
    const double chase = usv_speed < pm.cruise_speed ? pm.cruise_speed / (pm.cruise_speed - usv_speed) : 10.0;
    return uav_leg_energy(distance(from, usv) * chase, 0.0, loaded, pm);
}

VehicleReport make_report(const UavAgent& a, double now) {
    VehicleReport r;
    r.vehicle_id = a.id;
    r.vehicle_type = "uav";
    r.mode = std::string(to_string(a.mode));
    r.position_estimate = a.position;
    r.altitude = a.altitude;
    r.battery_wh = a.battery.charge;
    r.task = a.sortie ? std::string(to_string(a.sortie->objective)) + (a.sortie->mug_id.empty() ? "" : " " + a.sortie->mug_id)
                      : std::string("docked");
    r.sampled_at = now;
    return r;
}

bool apply_uav_command(UavAgent& agent, const OperatorCommand& cmd, double now,
                       std::vector<UavModeChange>* changes) {
    if (cmd.verb != CommandVerb::AbortSortie) return false;
    if (agent.mode != UavMode::TransitOut && agent.mode != UavMode::HoverPickup && agent.mode != UavMode::RelayLoiter)
        return false;
    fire(agent, UavEvent::Abort, now, changes);
    return true;
}

std::optional<std::string> complete_hover(UavAgent& agent, double now, std::vector<UavModeChange>* changes) {
    if (agent.mode != UavMode::HoverPickup || !agent.sortie || !agent.hover_complete_at) return std::nullopt;
    const std::string mug = agent.sortie->mug_id;
    if (agent.sortie->objective == SortieObjective::Deploy) {
        agent.deploy_payload.reset();
        fire(agent, UavEvent::ReleaseComplete, now, changes);
    } else {
        agent.carrying = mug;
        fire(agent, UavEvent::PickupComplete, now, changes);
    }
    return mug;
}

UavTickResult uav_tick(const UavAgent& agent, const UavContext& ctx) {
    UavTickResult r;
    r.agent = agent;
    UavAgent& a = r.agent;
    const double now = ctx.now;
    const double dt = ctx.dt;
    const UavPowerModel& pm = a.params.power;

    if (a.mode == UavMode::DockedCharging) {
        a.position = ctx.usv_position;
        a.altitude = a.params.deck_height;
        if (a.battery.charge < a.battery.capacity) r.requested_charge_power = pm.recharge_power;
        return r;
    }
    if (a.mode == UavMode::EmergencyLand) return r;

    const bool enforce = a.sortie && a.sortie->enforce_reserve;
    const bool outbound = a.mode == UavMode::TransitOut || a.mode == UavMode::HoverPickup || a.mode == UavMode::RelayLoiter;
    const bool loaded = a.carrying.has_value() || a.deploy_payload.has_value();
    const double mult = loaded ? pm.payload_power_multiplier : 1.0;
    const double step = pm.cruise_speed * dt;

    if (outbound && enforce) {
        const double worst_tick = std::max(pm.cruise_power, pm.hover_power) * mult * dt / kJoulesPerWh;
        // A recovery comes home with the MUG, after whatever hover is left.
        const bool loaded_home = loaded || a.sortie->objective == SortieObjective::Recover;
        const double hover_left = a.hover_complete_at ? std::max(0.0, *a.hover_complete_at - now) : 0.0;
        const double need = return_energy(a, a.position, ctx.usv_position, ctx.usv_speed, loaded_home) +
                            pm.hover_power * mult * hover_left / kJoulesPerWh + 2.0 * worst_tick;
        if (a.battery.charge - need < a.sortie->protected_wh(a.params.emergency_floor())) {
            fire(a, UavEvent::Abort, now, &r.changes);
            r.aborted = true;
        }
    }

    double power = 0.0;
    switch (a.mode) {
        case UavMode::TransitOut: {
            const SortiePlan& plan = *a.sortie;
            if (plan.objective == SortieObjective::Recover && ctx.mug && ctx.mug->broadcast_estimate)
                a.target = *ctx.mug->broadcast_estimate;
            const Vec2 before = a.position;
            a.position = move_toward(a.position, a.target, step);
            power = pm.cruise_power * mult * (distance(before, a.position) / step);
            if (a.position == a.target) {
                fire(a, plan.objective == SortieObjective::Relay ? UavEvent::ArrivedAtStation : UavEvent::ArrivedAtPickup,
                     now, &r.changes);
            }
            break;
        }
        case UavMode::HoverPickup: {
            const SortiePlan& plan = *a.sortie;
            if (plan.objective == SortieObjective::Deploy) {
                power = pm.hover_power * mult;
                if (!a.hover_complete_at) {
                    a.hover_complete_at = now + a.params.release_time;
                    r.schedule_hover_completion = a.hover_complete_at;
                }
                break;
            }
            if (a.hover_complete_at) {
                if (ctx.mug) a.position = move_toward(a.position, ctx.mug->true_position, step);
                power = pm.hover_power * mult;
                break;
            }
            if (!ctx.mug || !ctx.mug->awaiting_pickup) {
                r.pickup_failed = true;
                fire(a, UavEvent::PickupFailed, now, &r.changes);
                power = pm.hover_power * mult;
                break;
            }
            if (distance(a.position, ctx.mug->true_position) <= a.params.capture_radius) {
                a.search.active = false;
                a.hover_complete_at = now + a.params.pickup_time;
                r.schedule_hover_completion = a.hover_complete_at;
                power = pm.hover_power * mult;
                break;
            }
            if (!a.search.active) {
                a.search.active = true;
                a.search.center = a.position;
                // 2 sigma legs, but never wider than the swept width or the pattern leaves holes.
                a.search.leg_length = std::clamp(2.0 * plan.search_sigma, a.params.capture_radius,
                                                 2.0 * a.params.capture_radius);
                a.search.leg_index = 0;
            }
            if (a.search.leg_index >= a.params.max_search_legs) {
                r.pickup_failed = true;
                fire(a, UavEvent::PickupFailed, now, &r.changes);
                power = pm.hover_power * mult;
                break;
            }
            double budget = step;
            const Vec2 before = a.position;
            while (budget > 1e-9 && a.search.leg_index < a.params.max_search_legs) {
                const Vec2 next = expanding_square_point(a.search.center, a.search.leg_length, a.search.leg_index + 1);
                const double d = distance(a.position, next);
                if (d <= budget) {
                    a.position = next;
                    budget -= d;
                    ++a.search.leg_index;
                } else {
                    a.position = move_toward(a.position, next, budget);
                    budget = 0.0;
                }
            }
            const double flown = distance(before, a.position) > 0.0 ? step - budget : 0.0;
            a.search_distance += flown;
            power = pm.cruise_power * mult * (flown / step);
            break;
        }
        case UavMode::RelayLoiter: {
            power = pm.hover_power * mult;
            if (now + dt - a.mode_since >= a.sortie->relay_duration - 1e-9)
                fire(a, UavEvent::LoiterComplete, now, &r.changes);
            break;
        }
        case UavMode::TransitBack: {
            const Vec2 before = a.position;
            a.position = move_toward(a.position, ctx.usv_position, step);
            power = pm.cruise_power * mult * (distance(before, a.position) / step);
            if (distance(a.position, ctx.usv_position) <= a.params.dock_radius) {
                a.position = ctx.usv_position;
                r.docked_now = true;
            }
            break;
        }
        default: break;
    }

    const BatteryStep bs = battery_step(a.battery, power, dt);
    a.battery = bs.store;
    r.consumed_wh = -bs.applied_wh;
    r.shortfall_wh = bs.shortfall_wh;

    if (a.mode != UavMode::DockedCharging && now >= a.next_report_at) {
        r.reports.push_back(make_report(a, now));
        a.next_report_at = now + 60.0;
    }

    if (a.battery.charge <= a.params.emergency_floor()) {
        fire(a, UavEvent::EmergencyFloor, now, &r.changes);
        r.emergency_landed = true;
        r.docked_now = false;
    } else if (r.docked_now) {
        r.delivered_mug = a.carrying;
        r.completed_sortie = a.sortie;
        fire(a, UavEvent::Docked, now, &r.changes);
    }
    return r;
}

}  // namespace oasys
