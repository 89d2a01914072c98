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
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "oasys/ctd.hpp"
#include "oasys/messages.hpp"
#include "oasys/navigation.hpp"
#include "oasys/physics.hpp"
#include "oasys/powertrain.hpp"

namespace oasys {

enum class MugMode {
    PreDeploy,
    Descend,
    Ascend,
    SurfaceFix,
    Transmit,
    WaitRecovery,
    Recovered,
    FaultLowBattery,
    FaultOverdepth,
};

enum class MugEvent {
    Deploy,
    TargetReached,
    Surfaced,
    SurfacedForRecovery,
    FixAcquired,
    TransmitDone,
    LowBattery,
    Depleted,
    OverDepth,
    RecoveryRequested,
    PickedUp,
};

inline constexpr MugMode kAllMugModes[] = {
    MugMode::PreDeploy,    MugMode::Descend,   MugMode::Ascend,          MugMode::SurfaceFix,     MugMode::Transmit,
    MugMode::WaitRecovery, MugMode::Recovered, MugMode::FaultLowBattery, MugMode::FaultOverdepth,
};
inline constexpr MugEvent kAllMugEvents[] = {
    MugEvent::Deploy,       MugEvent::TargetReached, MugEvent::Surfaced,  MugEvent::SurfacedForRecovery,
    MugEvent::FixAcquired,  MugEvent::TransmitDone,  MugEvent::LowBattery, MugEvent::Depleted,
    MugEvent::OverDepth,    MugEvent::RecoveryRequested, MugEvent::PickedUp,
};

std::string_view to_string(MugMode mode);
std::string_view to_string(MugEvent event);

struct MugTransition {
    MugMode from;
    MugEvent event;
    MugMode to;
};

// The declared transitions. Pairs not listed leave the mode unchanged.
const std::vector<MugTransition>& mug_transition_table();
MugMode mug_transition(MugMode mode, MugEvent event);

// Stowed on the USV or hanging under a UAV: no physics, no power draw.
bool is_stowed(MugMode mode);

struct MugParams {
    MugBody body = MugBody::with_diameter(2.6, 0.07, 0.56, 1.0);
    VbsState vbs{};
    MotorModel motor{};
    double neutral_fraction = 0.5;
    double target_depth = 200.0;  // m
    double crush_depth = 200.0;   // m
    double hotel_power = 0.5;     // W
    double transmit_power = 1.0;  // W while the radio is keyed
    double gps_noise = 5.0;       // m
    double drift_rate = 50.0 / 3600.0;  // m/s of sigma growth
    double fix_duration = 30.0;
    double transmit_timeout = 300.0;
    double sample_interval = 10.0;
    double telemetry_interval = 60.0;
    double recovery_fix_interval = 60.0;
    std::size_t report_base_size = 48;  // bytes
    std::size_t sample_size = 12;       // bytes per CTD sample in a report
    GlideCommand glide{};
    CtdProfile ctd{};
    EnergyStore battery = EnergyStore::make(25.2 * 3.5, 25.2 * 3.5, 25.2, 0.2 * 25.2 * 3.5);

    void validate() const;
};

struct MugAgent {
    std::string id;
    MugParams params;
    MugKinematics kin{};
    VbsState vbs{};
    EnergyStore battery{};
    MugMode mode = MugMode::PreDeploy;
    double mode_since = 0.0;
    NavEstimate nav{};
    int yo_count = 0;
    double target_depth = 200.0;
    std::vector<CtdSample> samples;  // collected since the last report
    std::size_t total_samples = 0;
    double piston_setpoint = 1.0;
    bool recovery_latched = false;
    double next_sample_at = 0.0;
    double next_report_at = 0.0;
    double next_fix_at = 0.0;
    double max_depth_reached = 0.0;
    std::optional<double> deployed_at;
    std::optional<double> mission_end_at;  // first entry into WAIT_RECOVERY or FAULT_LOW_BATTERY
};

// Builds an agent with trim calibrated for `env`, stowed (PRE_DEPLOY).
MugAgent make_mug(const std::string& id, const MugParams& params, const Environment& env);

struct MugModeChange {
    MugMode from;
    MugMode to;
    MugEvent event;
    double time;
};

struct MugContext {
    const Environment& env;
    double now = 0.0;
    double dt = 1.0;
    std::size_t outbound_pending = 0;  // queued messages not yet handed to a next hop
    double tx_seconds = 0.0;           // radio-on time during the previous comms step
    std::mt19937_64* rng = nullptr;
};

struct MugTickResult {
    MugAgent agent;
    std::vector<VehicleReport> reports;
    std::vector<MugModeChange> changes;
    double consumed_wh = 0.0;
    double shortfall_wh = 0.0;
    double vbs_wh = 0.0;
    bool overdepth = false;
};

// Fires an FSM event, recording the change if the mode moves.
void fire(MugAgent& agent, MugEvent event, double now, std::vector<MugModeChange>* changes);

// Puts a stowed MUG in the water at `position` and starts the first descent.
void deploy_mug(MugAgent& agent, const Vec2& position, double now, std::vector<MugModeChange>* changes);

// Applies a delivered command. Returns false when the verb does not apply.
bool apply_mug_command(MugAgent& agent, const OperatorCommand& cmd, double now, std::vector<MugModeChange>* changes);

MugTickResult mug_tick(const MugAgent& agent, const MugContext& ctx);

struct PistonStep {
    VbsState vbs;
    double energy_wh = 0.0;
    MotorDraw draw{};
};

// Moves the piston toward `setpoint` for dt at the motor's achievable speed.
PistonStep advance_piston(const VbsState& vbs, double setpoint, double depth, const MotorModel& motor,
                          const Environment& env, double dt);

// Deepest point reached if the piston were commanded to the light stop now.
double predict_turn_depth(const MugAgent& agent, const Environment& env, double dt);

VehicleReport make_report(const MugAgent& agent, double now);

}  // namespace oasys
