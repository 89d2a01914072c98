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

#include "oasys/mug.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oasys {

namespace {

constexpr double kStopTolerance = 1e-9;

double setpoint_for(MugMode mode, double current) {
    switch (mode) {
        case MugMode::Descend: return 0.0;
        case MugMode::Ascend:
        case MugMode::SurfaceFix:
        case MugMode::Transmit:
        case MugMode::WaitRecovery:
        case MugMode::FaultOverdepth: return 1.0;
        default: return current;
    }
}

bool is_active(MugMode mode) {
    return mode == MugMode::Descend || mode == MugMode::Ascend || mode == MugMode::SurfaceFix ||
           mode == MugMode::Transmit;
}

}  // namespace

std::string_view to_string(MugMode mode) {
    switch (mode) {
        case MugMode::PreDeploy: return "PRE_DEPLOY";
        case MugMode::Descend: return "DESCEND";
        case MugMode::Ascend: return "ASCEND";
        case MugMode::SurfaceFix: return "SURFACE_FIX";
        case MugMode::Transmit: return "TRANSMIT";
        case MugMode::WaitRecovery: return "WAIT_RECOVERY";
        case MugMode::Recovered: return "RECOVERED";
        case MugMode::FaultLowBattery: return "FAULT_LOW_BATTERY";
        case MugMode::FaultOverdepth: return "FAULT_OVERDEPTH";
    }
    return "UNKNOWN";
}

std::string_view to_string(MugEvent event) {
    switch (event) {
        case MugEvent::Deploy: return "deploy";
        case MugEvent::TargetReached: return "target_reached";
        case MugEvent::Surfaced: return "surfaced";
        case MugEvent::SurfacedForRecovery: return "surfaced_for_recovery";
        case MugEvent::FixAcquired: return "fix_acquired";
        case MugEvent::TransmitDone: return "transmit_done";
        case MugEvent::LowBattery: return "low_battery";
        case MugEvent::Depleted: return "depleted";
        case MugEvent::OverDepth: return "over_depth";
        case MugEvent::RecoveryRequested: return "recovery_requested";
        case MugEvent::PickedUp: return "picked_up";
    }
    return "unknown";
}

const std::vector<MugTransition>& mug_transition_table() {
    using M = MugMode;
    using E = MugEvent;
    static const std::vector<MugTransition> table{
        {M::PreDeploy, E::Deploy, M::Descend},
        {M::Descend, E::TargetReached, M::Ascend},
        {M::Descend, E::LowBattery, M::Ascend},
        {M::Descend, E::RecoveryRequested, M::Ascend},
        {M::Descend, E::OverDepth, M::FaultOverdepth},
        {M::Descend, E::Depleted, M::FaultLowBattery},
        {M::Ascend, E::Surfaced, M::SurfaceFix},
        {M::Ascend, E::SurfacedForRecovery, M::WaitRecovery},
        {M::Ascend, E::OverDepth, M::FaultOverdepth},
        {M::Ascend, E::Depleted, M::FaultLowBattery},
        {M::SurfaceFix, E::FixAcquired, M::Transmit},
        {M::SurfaceFix, E::LowBattery, M::WaitRecovery},
        {M::SurfaceFix, E::RecoveryRequested, M::WaitRecovery},
        {M::SurfaceFix, E::Depleted, M::FaultLowBattery},
        {M::Transmit, E::TransmitDone, M::Descend},
        {M::Transmit, E::LowBattery, M::WaitRecovery},
        {M::Transmit, E::RecoveryRequested, M::WaitRecovery},
        {M::Transmit, E::Depleted, M::FaultLowBattery},
        {M::WaitRecovery, E::PickedUp, M::Recovered},
        {M::WaitRecovery, E::Depleted, M::FaultLowBattery},
        {M::Recovered, E::Deploy, M::Descend},
        {M::FaultLowBattery, E::PickedUp, M::Recovered},
        {M::FaultOverdepth, E::Surfaced, M::WaitRecovery},
        {M::FaultOverdepth, E::SurfacedForRecovery, M::WaitRecovery},
        {M::FaultOverdepth, E::PickedUp, M::Recovered},
        {M::FaultOverdepth, E::Depleted, M::FaultLowBattery},
    };
    return table;
}

MugMode mug_transition(MugMode mode, MugEvent event) {
    for (const MugTransition& t : mug_transition_table())
        if (t.from == mode && t.event == event) return t.to;
    return mode;
}

bool is_stowed(MugMode mode) { return mode == MugMode::PreDeploy || mode == MugMode::Recovered; }

void MugParams::validate() const {
    MugBody b = body;
    b.hull_volume = 1.0;  // calibrated later; only the remaining invariants are checked here
    b.validate();
    motor.validate();
    vbs.validate(motor.max_piston_speed / vbs.stroke_length);
    if (neutral_fraction < 0.0 || neutral_fraction > 1.0) throw std::invalid_argument("mug.neutral_fraction must be in [0, 1]");
    if (!(crush_depth > 0.0)) throw std::invalid_argument("mug.crush_depth must be > 0");
    if (!(target_depth > 0.0 && target_depth <= crush_depth))
        throw std::invalid_argument("mug.target_depth must be in (0, crush_depth]");
    if (hotel_power < 0.0 || transmit_power < 0.0) throw std::invalid_argument("mug power loads must be >= 0");
    if (gps_noise < 0.0 || drift_rate < 0.0) throw std::invalid_argument("mug navigation parameters must be >= 0");
    if (!(fix_duration >= 0.0 && transmit_timeout > 0.0 && sample_interval > 0.0 && telemetry_interval > 0.0 &&
          recovery_fix_interval > 0.0))
        throw std::invalid_argument("mug intervals must be positive");
    if (glide.glide_ratio < 0.0) throw std::invalid_argument("mug.glide_ratio must be >= 0");
    if (std::abs(glide.pitch) > std::numbers::pi / 4.0 + 1e-12) throw std::invalid_argument("mug.pitch must be within 45 deg");
    ctd.validate();
    battery.validate();
}

MugAgent make_mug(const std::string& id, const MugParams& params, const Environment& env) {
    MugAgent a;
    a.id = id;
    a.params = params;
    a.vbs = params.vbs;
    a.vbs.piston_fraction = 1.0;
    a.vbs.piston_rate = 0.0;
    a.params.body.hull_volume = calibrate_hull_volume(params.body, a.vbs, env, params.neutral_fraction);
    a.battery = params.battery;
    a.target_depth = params.target_depth;
    a.piston_setpoint = 1.0;
    a.nav.sigma = params.gps_noise;
    return a;
}

void fire(MugAgent& agent, MugEvent event, double now, std::vector<MugModeChange>* changes) {
    if (event == MugEvent::RecoveryRequested || event == MugEvent::LowBattery) agent.recovery_latched = true;
    const MugMode next = mug_transition(agent.mode, event);
    if (next == agent.mode) return;
    if (changes) changes->push_back({agent.mode, next, event, now});
    agent.mode = next;
    agent.mode_since = now;
    agent.piston_setpoint = setpoint_for(next, agent.piston_setpoint);
    if ((next == MugMode::WaitRecovery || next == MugMode::FaultLowBattery) && !agent.mission_end_at)
        agent.mission_end_at = now;
    if (next == MugMode::Recovered) {
        agent.kin.depth = 0.0;
        agent.kin.vertical_velocity = 0.0;
        agent.kin.horizontal_velocity = {};
    }
}

void deploy_mug(MugAgent& agent, const Vec2& position, double now, std::vector<MugModeChange>* changes) {
    if (!is_stowed(agent.mode)) throw std::logic_error("deploy_mug: " + agent.id + " is not stowed");
    agent.kin = MugKinematics{};
    agent.kin.position = position;
    agent.nav = {position, agent.params.gps_noise};
    agent.recovery_latched = false;
    agent.next_sample_at = now;
    agent.next_report_at = now;
    if (!agent.deployed_at) agent.deployed_at = now;
    fire(agent, MugEvent::Deploy, now, changes);
}

bool apply_mug_command(MugAgent& agent, const OperatorCommand& cmd, double now,
                       std::vector<MugModeChange>* changes) {
    switch (cmd.verb) {
        case CommandVerb::SetTargetDepth:
            if (!(cmd.value > 0.0 && cmd.value <= agent.params.crush_depth)) return false;
            agent.target_depth = cmd.value;
            return true;
        case CommandVerb::RequestRecovery:
            if (!is_active(agent.mode)) return false;
            fire(agent, MugEvent::RecoveryRequested, now, changes);
            return true;
        default: return false;
    }
}

PistonStep advance_piston(const VbsState& vbs, double setpoint, double depth, const MotorModel& motor,
                          const Environment& env, double dt) {
    PistonStep s{vbs};
    const double gap = setpoint - vbs.piston_fraction;
    if (std::abs(gap) <= kStopTolerance) {
        s.vbs.piston_fraction = std::clamp(setpoint, 0.0, 1.0);
        s.vbs.piston_rate = 0.0;
        return s;
    }
    const bool pumping_out = gap > 0.0;
    const double load = pumping_out ? gauge_pressure(depth, env) * vbs.piston_area : 0.0;
    s.draw = motor_current(load, motor.max_piston_speed, Medium::Oil, motor);
    const double max_delta = s.draw.achieved_speed * dt / vbs.stroke_length;
    const double delta = std::copysign(std::min(std::abs(gap), max_delta), gap);
    s.vbs.piston_fraction = std::clamp(vbs.piston_fraction + delta, 0.0, 1.0);
    s.vbs.piston_rate = delta / dt;
    s.energy_wh = vbs_stroke_energy(depth, delta, motor, vbs, env);
    return s;
}

double predict_turn_depth(const MugAgent& agent, const Environment& env, double dt) {
    VbsState vbs = agent.vbs;
    MugKinematics kin = agent.kin;
    double deepest = kin.depth;
    const int max_steps = static_cast<int>(std::ceil(3600.0 / dt));
    for (int i = 0; i < max_steps && kin.vertical_velocity > 0.0; ++i) {
        vbs = advance_piston(vbs, 1.0, kin.depth, agent.params.motor, env, dt).vbs;
        const double f = net_buoyant_force(vbs, agent.params.body, env, agent.params.neutral_fraction);
        kin = vertical_step(kin, f, agent.params.body, env, dt);
        deepest = std::max(deepest, kin.depth);
    }
    return deepest;
}

VehicleReport make_report(const MugAgent& a, double now) {
    VehicleReport r;
    r.vehicle_id = a.id;
    r.vehicle_type = "mug";
    r.mode = std::string(to_string(a.mode));
    r.position_estimate = a.nav.position;
    r.depth = a.kin.depth;
    r.sigma = a.nav.sigma;
    r.battery_wh = a.battery.charge;
    r.yo_count = a.yo_count;
    r.target_depth = a.target_depth;
    r.task = a.mode == MugMode::WaitRecovery ? "awaiting recovery" : "profiling";
    r.ctd_samples = a.samples.size();
    r.sampled_at = now;
    return r;
}

MugTickResult mug_tick(const MugAgent& agent, const MugContext& ctx) {
    MugTickResult r;
    r.agent = agent;
    MugAgent& a = r.agent;
    if (is_stowed(a.mode)) return r;

    const double now = ctx.now;
    const double dt = ctx.dt;
    const Environment& env = ctx.env;
    const MugParams& p = a.params;
    const bool powered = a.mode != MugMode::FaultLowBattery && a.battery.charge > 0.0;

    if (a.recovery_latched && (a.mode == MugMode::Descend || a.mode == MugMode::SurfaceFix || a.mode == MugMode::Transmit))
        fire(a, MugEvent::RecoveryRequested, now, &r.changes);

    if (powered) {
        PistonStep ps = advance_piston(a.vbs, a.piston_setpoint, a.kin.depth, p.motor, env, dt);
        a.vbs = ps.vbs;
        r.vbs_wh = ps.energy_wh;
    } else {
        a.vbs.piston_rate = 0.0;
    }

    const double force = net_buoyant_force(a.vbs, p.body, env, p.neutral_fraction);
    a.kin = vertical_step(a.kin, force, p.body, env, dt);
    a.kin = glide_step(a.kin, p.glide, env, dt);
    a.max_depth_reached = std::max(a.max_depth_reached, a.kin.depth);

    if (a.kin.depth > p.crush_depth && a.mode != MugMode::FaultOverdepth) {
        r.overdepth = true;
        fire(a, MugEvent::OverDepth, now, &r.changes);
    }

    const bool at_light_stop = a.vbs.piston_fraction >= 1.0 - kStopTolerance;
    switch (a.mode) {
        case MugMode::Descend: {
            const double v = a.kin.vertical_velocity;
            if (a.kin.depth >= a.target_depth) {
                fire(a, MugEvent::TargetReached, now, &r.changes);
            } else if (v > 0.0 && predict_turn_depth(a, env, dt) + v * dt >= a.target_depth) {
                fire(a, MugEvent::TargetReached, now, &r.changes);
            }
            break;
        }
        case MugMode::Ascend:
            if (a.kin.depth <= 0.0 && at_light_stop) {
                ++a.yo_count;
                fire(a, a.recovery_latched ? MugEvent::SurfacedForRecovery : MugEvent::Surfaced, now, &r.changes);
            }
            break;
        case MugMode::FaultOverdepth:
            if (a.kin.depth <= 0.0 && at_light_stop) fire(a, MugEvent::SurfacedForRecovery, now, &r.changes);
            break;
        case MugMode::SurfaceFix:
            if (now + dt - a.mode_since >= p.fix_duration - 1e-9) {
                a.nav = gps_fix(a.kin.position, p.gps_noise, *ctx.rng);
                a.next_report_at = now;
                fire(a, MugEvent::FixAcquired, now, &r.changes);
            }
            break;
        case MugMode::Transmit: {
            const double elapsed = now - a.mode_since;
            if ((elapsed >= dt - 1e-9 && ctx.outbound_pending == 0) || elapsed >= p.transmit_timeout - 1e-9)
                fire(a, MugEvent::TransmitDone, now, &r.changes);
            break;
        }
        case MugMode::WaitRecovery:
            if (now >= a.next_fix_at && a.mode_since != now) {
                a.nav = gps_fix(a.kin.position, p.gps_noise, *ctx.rng);
                a.next_fix_at = now + p.recovery_fix_interval;
            }
            break;
        default: break;
    }

    if (a.mode == MugMode::WaitRecovery && a.mode_since == now) {
        // Entry: fix and announce the pickup position.
        a.nav = gps_fix(a.kin.position, p.gps_noise, *ctx.rng);
        a.next_fix_at = now + p.recovery_fix_interval;
        a.next_report_at = now;
    }

    if (a.kin.submerged()) {
        a.nav = dead_reckon_update(a.nav, p.drift_rate, dt);
        if (now >= a.next_sample_at) {
            const CtdPoint c = p.ctd.at(a.kin.depth);
            a.samples.push_back({now, a.kin.depth, c.temperature, c.conductivity, a.nav.position});
            ++a.total_samples;
            a.next_sample_at = now + p.sample_interval;
        }
    }

    if (powered && now >= a.next_report_at) {
        r.reports.push_back(make_report(a, now));
        a.samples.clear();
        a.next_report_at = now + p.telemetry_interval;
    }

    if (a.mode != MugMode::FaultLowBattery) {
        const double power = p.hotel_power + p.transmit_power * ctx.tx_seconds / dt + r.vbs_wh * kJoulesPerWh / dt;
        const BatteryStep bs = battery_step(a.battery, power, dt);
        a.battery = bs.store;
        r.consumed_wh = -bs.applied_wh;
        r.shortfall_wh = bs.shortfall_wh;
        if (bs.low && is_active(a.mode) && !a.recovery_latched) fire(a, MugEvent::LowBattery, now, &r.changes);
        if (bs.depleted) fire(a, MugEvent::Depleted, now, &r.changes);
    }
    return r;
}

}  // namespace oasys
