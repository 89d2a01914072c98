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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "oasys/mug.hpp"
#include "oasys/sortie.hpp"
#include "oasys/uav.hpp"
#include "oasys/usv.hpp"

namespace oasys {

struct CoordinatorConfig {
    bool enabled = true;
    double decision_interval = 60.0;  // s
    double reserve_fraction = 0.2;
    std::size_t relay_threshold = 50;  // queued messages at a surfaced MUG
    double relay_altitude = 50.0;      // m
    double relay_min_duration = 120.0; // s of loiter
    double relay_link_margin = 0.95;   // fraction of the horizon used when siting a relay
    double horizon = 86400.0;          // s
    double forecast_dt = 60.0;         // s
    double min_drop_depth = 250.0;     // m of water required under a drop point
    double search_allowance = 2.0;     // extra search distance per metre of sigma
    bool auto_recover = true;
    bool enforce_reserve = true;  // turned off only by fault injection

    void validate() const;
};

// What the coordinator knows about one MUG.
struct MugView {
    std::string id;
    MugMode mode = MugMode::PreDeploy;
    Vec2 estimate{};
    double sigma = 0.0;
    bool surfaced = false;
    bool in_bay = false;
    bool carried = false;
    std::size_t queued_to_usv = 0;  // telemetry waiting at the MUG for the USV
    std::size_t queued_bytes = 0;
    bool direct_link = false;       // MUG-USV RF link this tick
};

struct CoordinatorSnapshot {
    double now = 0.0;
    Environment env{};
    UsvAgent usv;
    std::vector<UavAgent> uavs;  // ascending id
    std::vector<MugView> mugs;   // ascending id
    double radio_bandwidth = 2400.0;
    double mug_antenna_height = 0.1;
    double usv_antenna_height = 2.0;
};

// UAV away from the dock between start and end, drawing energy_wh at start.
struct CommittedLoad {
    std::string uav_id;
    double start = 0.0;
    double end = 0.0;
    double energy_wh = 0.0;
};

struct EnergyForecast {
    double start = 0.0;
    double horizon = 0.0;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<double> usv_charge;
    std::map<std::string, std::vector<double>> uav_charge;
    std::vector<std::string> assumptions;

    // Charge at the last sample not after t (clamped to the curve ends).
    double uav_at(const std::string& uav_id, double t) const;
    // Earliest sample time at or after `not_before` with charge >= wh.
    std::optional<double> first_uav_at_least(const std::string& uav_id, double wh, double not_before) const;
};

// Committed loads implied by UAVs already in the air.
std::vector<CommittedLoad> airborne_loads(const CoordinatorSnapshot& snap);

// Deterministic rollout of USV solar, hotel and dock charging plus the
// committed sorties. Throws std::invalid_argument unless horizon >= 0 and dt > 0.
EnergyForecast forecast_energy(const CoordinatorSnapshot& snap, double horizon, double dt,
                               const std::vector<CommittedLoad>& committed = {});

struct Deferred {
    std::string reason;
    double retry_at = 0.0;
    double required_wh = 0.0;
};

struct Rejected {
    std::string reason;
};

using PlanOutcome = std::variant<SortiePlan, Deferred, Rejected>;

PlanOutcome plan_recovery(const std::string& mug_id, const CoordinatorSnapshot& snap, const EnergyForecast& forecast,
                          const CoordinatorConfig& cfg);

// Returns nothing when no relay is warranted.
std::optional<PlanOutcome> schedule_relay(const CoordinatorSnapshot& snap, const EnergyForecast& forecast,
                                          const CoordinatorConfig& cfg);

struct DeploymentRequest {
    std::string mug_id;
    Vec2 drop_point{};
    double not_before = 0.0;
};

// Serialized deployment sorties from the bay, each launched once the UAV has
// recharged from the previous one. Requests for MUGs not in the bay are skipped.
std::vector<SortiePlan> plan_deployment(const std::vector<DeploymentRequest>& schedule,
                                        const CoordinatorSnapshot& snap, const CoordinatorConfig& cfg);

// Water depth under a drop point must leave the configured margin.
bool drop_point_ok(double seafloor_depth, const CoordinatorConfig& cfg);

enum class PlanEventKind { Issued, Deferred, Rejected };
std::string_view to_string(PlanEventKind kind);

struct PlanEvent {
    double time = 0.0;
    PlanEventKind kind = PlanEventKind::Issued;
    SortieObjective objective = SortieObjective::Recover;
    std::string mug_id;
    std::string uav_id;
    std::string reason;
    double retry_at = 0.0;
    double energy_wh = 0.0;
    std::uint64_t plan_id = 0;
};

struct CoordinatorState {
    std::vector<DeploymentRequest> deployments;  // pending, in schedule order
    std::map<std::string, double> retry_at;      // "<objective>:<mug>" -> time
    std::uint64_t next_plan_id = 1;
    std::vector<SortiePlan> active;  // launched and not yet docked
    std::size_t sorties_launched = 0;
    std::size_t deferrals = 0;
};

struct Decision {
    std::vector<SortiePlan> launches;
    std::vector<PlanEvent> events;
};

// One decision step. At most one launch per step (single dock).
Decision decide(CoordinatorState& state, const CoordinatorSnapshot& snap, const CoordinatorConfig& cfg);

}  // namespace oasys
