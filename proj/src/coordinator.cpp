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

#include "oasys/coordinator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oasys/comms.hpp"

namespace oasys {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const UavAgent* find_uav(const CoordinatorSnapshot& snap) {
    return snap.uavs.empty() ? nullptr : &snap.uavs.front();
}

const MugView* find_mug(const CoordinatorSnapshot& snap, const std::string& id) {
    for (const MugView& m : snap.mugs)
        if (m.id == id) return &m;
    return nullptr;
}

std::string retry_key(SortieObjective objective, const std::string& mug) {
    return std::string(to_string(objective)) + ":" + mug;
}

struct Geometry {
    std::vector<Vec2> legs;
    double energy = 0.0;
    double duration = 0.0;
};

// Out to `station`, work there for `hover` seconds, back to where the USV
// will be. `extra` is added outbound distance (search allowance).
Geometry sortie_geometry(const CoordinatorSnapshot& snap, const UavAgent& uav, const Vec2& station, double launch,
                         double hover, double extra, bool loaded_out, bool loaded_back) {
    const UavPowerModel& pm = uav.params.power;
    const double v = pm.cruise_speed;
    const Vec2 start = predict_usv_position(snap.usv, launch - snap.now);
    const double out = distance(start, station) + extra;
    const double done = launch + out / v + hover;
    Vec2 back_to = predict_usv_position(snap.usv, done - snap.now);
    for (int i = 0; i < 3; ++i)
        back_to = predict_usv_position(snap.usv, done - snap.now + distance(station, back_to) / v);
    const double back = distance(station, back_to);
    Geometry g;
    g.legs = {start, station, back_to};
    g.energy = uav_leg_energy(out, hover, loaded_out, pm) + uav_leg_energy(back, 0.0, loaded_back, pm);
    g.duration = out / v + hover + back / v;
    return g;
}

// Applies the reserve rule against the forecast.
PlanOutcome finalize(SortiePlan plan, const EnergyForecast& forecast, const CoordinatorSnapshot& snap,
                     const CoordinatorConfig& cfg) {
    const UavAgent* uav = find_uav(snap);
    const double required = plan.required_wh(uav ? uav->params.emergency_floor() : 0.0);
    const std::optional<double> when = forecast.first_uav_at_least(plan.uav_id, required, snap.now);
    if (!when) return Deferred{"insufficient_energy", snap.now + cfg.horizon, required};
    if (*when > snap.now + 1e-9) return Deferred{"insufficient_energy", *when, required};
    plan.launch_time = snap.now;
    return plan;
}

SortiePlan base_plan(const UavAgent& uav, SortieObjective objective, const std::string& mug,
                     const CoordinatorConfig& cfg) {
    SortiePlan p;
    p.uav_id = uav.id;
    p.objective = objective;
    p.mug_id = mug;
    p.reserve_fraction = cfg.reserve_fraction;
    p.enforce_reserve = cfg.enforce_reserve;
    p.relay_altitude = cfg.relay_altitude;
    return p;
}

std::optional<Deferred> uav_unavailable(const UavAgent* uav, const CoordinatorSnapshot& snap,
                                        const CoordinatorConfig& cfg) {
    if (!uav) return Deferred{"no_uav", snap.now + cfg.horizon, 0.0};
    if (uav->mode == UavMode::DockedCharging) return std::nullopt;
    double back = snap.now + cfg.decision_interval;
    for (const CommittedLoad& l : airborne_loads(snap))
        if (l.uav_id == uav->id && std::isfinite(l.end)) back = std::max(back, l.end);
    return Deferred{"uav_busy", std::min(back, snap.now + cfg.horizon), 0.0};
}

}  // namespace

void CoordinatorConfig::validate() const {
    if (!(decision_interval > 0.0)) throw std::invalid_argument("coordinator.decision_interval must be > 0");
    if (reserve_fraction < 0.0) throw std::invalid_argument("coordinator.reserve_fraction must be >= 0");
    if (!(relay_altitude > 0.0)) throw std::invalid_argument("coordinator.relay_altitude must be > 0");
    if (relay_min_duration < 0.0) throw std::invalid_argument("coordinator.relay_min_duration must be >= 0");
    if (!(relay_link_margin > 0.0) || relay_link_margin > 1.0)
        throw std::invalid_argument("coordinator.relay_link_margin must be in (0, 1]");
    if (!(horizon > 0.0)) throw std::invalid_argument("coordinator.horizon must be > 0");
    if (!(forecast_dt > 0.0)) throw std::invalid_argument("coordinator.forecast_dt must be > 0");
    if (min_drop_depth < 0.0) throw std::invalid_argument("coordinator.min_drop_depth must be >= 0");
    if (search_allowance < 0.0) throw std::invalid_argument("coordinator.search_allowance must be >= 0");
}

std::string_view to_string(PlanEventKind kind) {
    switch (kind) {
        case PlanEventKind::Issued: return "plan_issued";
        case PlanEventKind::Deferred: return "plan_deferred";
        case PlanEventKind::Rejected: return "plan_rejected";
    }
    return "unknown";
}

double EnergyForecast::uav_at(const std::string& uav_id, double t) const {
    const auto it = uav_charge.find(uav_id);
    if (it == uav_charge.end()) throw std::out_of_range("forecast: unknown uav " + uav_id);
    const std::vector<double>& c = it->second;
    if (t <= start || dt <= 0.0) return c.front();
    const auto k = static_cast<std::size_t>(std::floor((t - start) / dt + 1e-9));
    return c[std::min(k, c.size() - 1)];
}

std::optional<double> EnergyForecast::first_uav_at_least(const std::string& uav_id, double wh,
                                                         double not_before) const {
    const auto it = uav_charge.find(uav_id);
    if (it == uav_charge.end()) return std::nullopt;
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] >= not_before - 1e-9 && it->second[k] >= wh - 1e-9) return times[k];
    return std::nullopt;
}

std::vector<CommittedLoad> airborne_loads(const CoordinatorSnapshot& snap) {
    std::vector<CommittedLoad> loads;
    for (const UavAgent& u : snap.uavs) {
        if (u.mode == UavMode::DockedCharging) continue;
        CommittedLoad l{u.id, snap.now, kInf, 0.0};
        if (u.mode != UavMode::EmergencyLand && u.sortie) {
            const SortiePlan& p = *u.sortie;
            const double elapsed = snap.now - p.launch_time;
            const double left = p.duration_estimate > 0.0 ? std::clamp(1.0 - elapsed / p.duration_estimate, 0.0, 1.0) : 0.0;
            l.energy_wh = p.energy_estimate * left;
            l.end = std::max(snap.now, p.launch_time + p.duration_estimate);
        }
        loads.push_back(l);
    }
    return loads;
}

EnergyForecast forecast_energy(const CoordinatorSnapshot& snap, double horizon, double dt,
                               const std::vector<CommittedLoad>& committed) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("forecast_energy: horizon must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("forecast_energy: dt must be > 0");
    EnergyForecast f;
    f.start = snap.now;
    f.horizon = horizon;
    f.dt = dt;

    std::vector<CommittedLoad> loads = airborne_loads(snap);
    loads.insert(loads.end(), committed.begin(), committed.end());
    f.assumptions.push_back("usv hotel " + std::to_string(snap.usv.params.hotel_power) + " W");
    f.assumptions.push_back("solar half-sine peak " + std::to_string(snap.env.solar_peak) + " W");
    for (const CommittedLoad& l : loads)
        f.assumptions.push_back("uav " + l.uav_id + " away from " + std::to_string(l.start) + " drawing " +
                                std::to_string(l.energy_wh) + " Wh");

    EnergyStore usv = snap.usv.battery;
    const double usv_floor = snap.usv.params.dock_reserve_fraction * usv.capacity;
    std::map<std::string, EnergyStore> uav;
    std::map<std::string, double> away_until;
    std::map<std::string, double> recharge;
    for (const UavAgent& u : snap.uavs) {
        uav[u.id] = u.battery;
        away_until[u.id] = snap.now;
        recharge[u.id] = u.params.power.recharge_power;
    }
    std::vector<bool> applied(loads.size(), false);

    auto sample = [&](double t) {
        f.times.push_back(t);
        f.usv_charge.push_back(usv.charge);
        for (const auto& [id, s] : uav) f.uav_charge[id].push_back(s.charge);
    };

    const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = snap.now + static_cast<double>(k) * dt;
        for (std::size_t i = 0; i < loads.size(); ++i) {
            const CommittedLoad& l = loads[i];
            if (applied[i] || !uav.count(l.uav_id) || l.start >= t + dt) continue;
            applied[i] = true;
            EnergyStore& s = uav[l.uav_id];
            s.charge = std::max(0.0, s.charge - l.energy_wh);
            away_until[l.uav_id] = std::max(away_until[l.uav_id], l.end);
        }
        sample(t);
        if (k == steps) break;
        const double h = std::min(dt, snap.now + horizon - t);
        usv = battery_step(usv, snap.usv.params.hotel_power, h).store;
        const double solar = solar_harvest(time_of_day(t, snap.env), snap.env);
        if (solar > 0.0) usv = battery_step(usv, -solar, h).store;
        for (auto& [id, s] : uav) {
            if (away_until[id] > t || s.charge >= s.capacity) continue;
            const DockTransfer tr = dock_transfer(usv, s, recharge[id], h, usv_floor);
            usv = tr.usv;
            s = tr.uav;
            break;  // one UAV on the dock at a time
        }
    }
    return f;
}

PlanOutcome plan_recovery(const std::string& mug_id, const CoordinatorSnapshot& snap, const EnergyForecast& forecast,
                          const CoordinatorConfig& cfg) {
    const MugView* mug = find_mug(snap, mug_id);
    if (!mug) return Rejected{"unknown_mug"};
    if (mug->in_bay || is_stowed(mug->mode)) return Rejected{"mug_at_dock"};
    if (mug->carried) return Rejected{"already_carried"};
    if (mug->mode != MugMode::WaitRecovery)
        return Deferred{"not_awaiting_recovery", snap.now + std::min(cfg.horizon, 10.0 * cfg.decision_interval), 0.0};
    const UavAgent* uav = find_uav(snap);
    if (auto busy = uav_unavailable(uav, snap, cfg)) return *busy;

    const double extra = cfg.search_allowance * mug->sigma;
    const Geometry g = sortie_geometry(snap, *uav, mug->estimate, snap.now, uav->params.pickup_time, extra, false, true);
    SortiePlan p = base_plan(*uav, SortieObjective::Recover, mug_id, cfg);
    p.station = mug->estimate;
    p.legs = g.legs;
    p.energy_estimate = g.energy;
    p.duration_estimate = g.duration;
    p.search_sigma = mug->sigma;
    return finalize(std::move(p), forecast, snap, cfg);
}

std::optional<PlanOutcome> schedule_relay(const CoordinatorSnapshot& snap, const EnergyForecast& forecast,
                                          const CoordinatorConfig& cfg) {
    const MugView* mug = nullptr;
    for (const MugView& m : snap.mugs) {
        if (m.surfaced && !m.in_bay && !m.carried && !m.direct_link && m.queued_to_usv > cfg.relay_threshold) {
            mug = &m;
            break;
        }
    }
    if (!mug) return std::nullopt;
    const UavAgent* uav = find_uav(snap);
    if (auto busy = uav_unavailable(uav, snap, cfg)) return PlanOutcome{*busy};

    const double duration =
        std::max(cfg.relay_min_duration, std::ceil(static_cast<double>(mug->queued_bytes) / snap.radio_bandwidth));
    auto make = [&](const Vec2& station) {
        const Geometry g = sortie_geometry(snap, *uav, station, snap.now, duration, 0.0, false, false);
        SortiePlan p = base_plan(*uav, SortieObjective::Relay, mug->id, cfg);
        p.station = station;
        p.relay_duration = duration;
        p.legs = g.legs;
        p.energy_estimate = g.energy;
        p.duration_estimate = g.duration;
        return finalize(std::move(p), forecast, snap, cfg);
    };

    const Vec2 usv = snap.usv.position;
    const Vec2 midpoint = (usv + mug->estimate) * 0.5;
    PlanOutcome at_mid = make(midpoint);
    if (std::holds_alternative<SortiePlan>(at_mid)) return at_mid;

    // Closest station to the USV on the USV-MUG line that keeps both links.
    const double span = distance(usv, mug->estimate);
    const double reach_mug = cfg.relay_link_margin * radio_horizon(snap.mug_antenna_height, cfg.relay_altitude);
    const double reach_usv = cfg.relay_link_margin * radio_horizon(snap.usv_antenna_height, cfg.relay_altitude);
    const double s = std::max(0.0, span - reach_mug);
    if (s > reach_usv || span <= 0.0) return at_mid;
    const Vec2 station = usv + (mug->estimate - usv) * (s / span);
    PlanOutcome near = make(station);
    return std::holds_alternative<SortiePlan>(near) ? near : at_mid;
}

std::vector<SortiePlan> plan_deployment(const std::vector<DeploymentRequest>& schedule,
                                        const CoordinatorSnapshot& snap, const CoordinatorConfig& cfg) {
    std::vector<SortiePlan> plans;
    const UavAgent* uav = find_uav(snap);
    if (!uav) return plans;
    const UavPowerModel& pm = uav->params.power;
    double charge = uav->battery.charge;
    double t = snap.now;
    if (uav->mode != UavMode::DockedCharging)
        for (const CommittedLoad& l : airborne_loads(snap))
            if (l.uav_id == uav->id) {
                t = std::isfinite(l.end) ? l.end : kInf;
                charge = std::max(0.0, charge - l.energy_wh);
            }
    if (!std::isfinite(t)) return plans;

    for (const DeploymentRequest& req : schedule) {
        const MugView* mug = find_mug(snap, req.mug_id);
        if (!mug || !mug->in_bay) continue;
        double launch = std::max(t, req.not_before);
        // Charge accrues while waiting for the request window.
        charge = std::min(pm.battery.capacity, charge + (launch - t) * pm.recharge_power / kJoulesPerWh);
        const Geometry g0 = sortie_geometry(snap, *uav, req.drop_point, launch, uav->params.release_time, 0.0, true, false);
        const double required = g0.energy + std::max(g0.energy * cfg.reserve_fraction, uav->params.emergency_floor());
        if (required > pm.battery.capacity) continue;
        if (charge < required) {
            launch += (required - charge) / pm.recharge_power * kJoulesPerWh;
            charge = required;
        }
        const Geometry g = sortie_geometry(snap, *uav, req.drop_point, launch, uav->params.release_time, 0.0, true, false);
        SortiePlan p = base_plan(*uav, SortieObjective::Deploy, req.mug_id, cfg);
        p.station = req.drop_point;
        p.legs = g.legs;
        p.energy_estimate = g.energy;
        p.duration_estimate = g.duration;
        p.launch_time = launch;
        plans.push_back(p);
        // The next sortie waits for the flight plus a full recharge of its energy.
        t = launch + g.duration + g.energy / pm.recharge_power * kJoulesPerWh;
        charge = std::min(pm.battery.capacity, charge);
    }
    return plans;
}

bool drop_point_ok(double seafloor_depth, const CoordinatorConfig& cfg) { return seafloor_depth >= cfg.min_drop_depth; }

Decision decide(CoordinatorState& state, const CoordinatorSnapshot& snap, const CoordinatorConfig& cfg) {
    Decision d;
    if (!cfg.enabled) return d;

    std::erase_if(state.active, [&](const SortiePlan& p) {
        for (const UavAgent& u : snap.uavs)
            if (u.id == p.uav_id) return !(u.sortie && u.sortie->plan_id == p.plan_id);
        return true;
    });
    auto targeted = [&](const std::string& mug) {
        return std::any_of(state.active.begin(), state.active.end(), [&](const SortiePlan& p) { return p.mug_id == mug; });
    };
    auto due = [&](const std::string& key) {
        const auto it = state.retry_at.find(key);
        return it == state.retry_at.end() || it->second <= snap.now + 1e-9;
    };

    bool launched = false;
    const EnergyForecast forecast = forecast_energy(snap, cfg.horizon, cfg.forecast_dt);

    auto handle = [&](const PlanOutcome& outcome, SortieObjective objective, const std::string& mug,
                      const std::string& key) {
        PlanEvent ev;
        ev.time = snap.now;
        ev.objective = objective;
        ev.mug_id = mug;
        if (const auto* plan = std::get_if<SortiePlan>(&outcome)) {
            SortiePlan p = *plan;
            p.plan_id = state.next_plan_id++;
            ev.kind = PlanEventKind::Issued;
            ev.uav_id = p.uav_id;
            ev.energy_wh = p.energy_estimate;
            ev.plan_id = p.plan_id;
            d.launches.push_back(p);
            state.active.push_back(p);
            ++state.sorties_launched;
            state.retry_at.erase(key);
            launched = true;
        } else if (const auto* def = std::get_if<Deferred>(&outcome)) {
            ev.kind = PlanEventKind::Deferred;
            ev.reason = def->reason;
            ev.retry_at = def->retry_at;
            ev.energy_wh = def->required_wh;
            state.retry_at[key] = std::max(def->retry_at, snap.now + cfg.decision_interval);
            ++state.deferrals;
        } else {
            ev.kind = PlanEventKind::Rejected;
            ev.reason = std::get<Rejected>(outcome).reason;
            state.retry_at[key] = snap.now + cfg.horizon;
        }
        d.events.push_back(ev);
    };

    if (cfg.auto_recover) {
        for (const MugView& m : snap.mugs) {
            if (launched) break;
            if (m.mode != MugMode::WaitRecovery || m.carried || m.in_bay || targeted(m.id)) continue;
            const std::string key = retry_key(SortieObjective::Recover, m.id);
            if (!due(key)) continue;
            handle(plan_recovery(m.id, snap, forecast, cfg), SortieObjective::Recover, m.id, key);
        }
    }

    for (auto it = state.deployments.begin(); !launched && it != state.deployments.end();) {
        const MugView* mug = find_mug(snap, it->mug_id);
        if (!mug || !mug->in_bay) {
            it = state.deployments.erase(it);
            continue;
        }
        const std::string key = retry_key(SortieObjective::Deploy, it->mug_id);
        if (it->not_before > snap.now + 1e-9 || !due(key) || targeted(it->mug_id)) {
            ++it;
            continue;
        }
        const UavAgent* uav = find_uav(snap);
        PlanOutcome outcome = Rejected{"no_uav"};
        if (auto busy = uav_unavailable(uav, snap, cfg)) {
            outcome = *busy;
        } else {
            const Geometry g = sortie_geometry(snap, *uav, it->drop_point, snap.now, uav->params.release_time, 0.0, true, false);
            SortiePlan p = base_plan(*uav, SortieObjective::Deploy, it->mug_id, cfg);
            p.station = it->drop_point;
            p.legs = g.legs;
            p.energy_estimate = g.energy;
            p.duration_estimate = g.duration;
            if (p.required_wh(uav->params.emergency_floor()) > uav->params.power.battery.capacity)
                outcome = Rejected{"exceeds_uav_capacity"};
            else
                outcome = finalize(std::move(p), forecast, snap, cfg);
        }
        const bool rejected = std::holds_alternative<Rejected>(outcome);
        handle(outcome, SortieObjective::Deploy, it->mug_id, key);
        if (launched || rejected)
            it = state.deployments.erase(it);
        else
            ++it;
        break;  // one deployment considered per step, in schedule order
    }

    if (!launched) {
        if (auto relay = schedule_relay(snap, forecast, cfg)) {
            std::string mug;
            for (const MugView& m : snap.mugs)
                if (m.surfaced && !m.in_bay && !m.carried && !m.direct_link && m.queued_to_usv > cfg.relay_threshold) {
                    mug = m.id;
                    break;
                }
            const std::string key = retry_key(SortieObjective::Relay, mug);
            if (due(key) && !targeted(mug)) handle(*relay, SortieObjective::Relay, mug, key);
        }
    }
    return d;
}

}  // namespace oasys
