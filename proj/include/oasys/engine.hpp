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
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oasys/comms.hpp"
#include "oasys/coordinator.hpp"
#include "oasys/knowledge.hpp"
#include "oasys/mug.hpp"
#include "oasys/scenario.hpp"
#include "oasys/telemetry.hpp"
#include "oasys/uav.hpp"
#include "oasys/usv.hpp"

namespace oasys {

enum class EventKind { HoverComplete, OperatorCommand, ForcedSortie };

struct ScheduledEvent {
    double time = 0.0;
    std::uint64_t seq = 0;  // insertion order breaks ties
    EventKind kind = EventKind::HoverComplete;
    std::string target;
    OperatorCommand command{};
};

// Time-ordered event overlay on the fixed-step loop.
class EventQueue {
public:
    void push(double time, EventKind kind, std::string target, OperatorCommand command = {});
    // Removes and returns every event with time < limit, in (time, seq) order.
    std::vector<ScheduledEvent> pop_before(double limit);
    std::optional<double> earliest() const;
    std::size_t size() const { return events_.size(); }

private:
    std::map<std::pair<double, std::uint64_t>, ScheduledEvent> events_;
    std::uint64_t next_seq_ = 0;
};

// Where a MUG physically is.
struct MugLocation {
    enum class Kind { Water, Bay, Carried } kind = Kind::Bay;
    std::string carrier;  // UAV id when carried
};

// One mission log entry, serialized once.
struct LogEvent {
    double time = 0.0;
    std::string kind;
    std::string vehicle;
    std::string json;  // full JSON object
};

struct WorldState {
    double sim_time = 0.0;
    std::uint64_t tick = 0;
    Environment env{};
    std::map<std::string, MugAgent> mugs;
    std::map<std::string, MugLocation> mug_location;
    std::map<std::string, UavAgent> uavs;
    std::optional<UsvAgent> usv;
    Network network;
    EventQueue events;
    std::mt19937_64 rng;
    CoordinatorState coordinator;
    std::vector<LogEvent> log;
};

struct EnergyAudit {
    double store_delta = 0.0;  // sum over stores of (charge - initial)
    double harvested = 0.0;
    double consumed = 0.0;
    double residual = 0.0;  // store_delta - (harvested - consumed)
    double relative = 0.0;  // residual / max(1, harvested + consumed)
    bool closed() const { return relative <= 1e-6; }
};

struct MugSummary {
    std::string id;
    int yo_count = 0;
    std::string mode;
    double final_charge = 0.0;
    double max_depth = 0.0;
    std::optional<double> deployed_at;
    std::optional<double> mission_end_at;
    std::optional<double> endurance_days;  // measured, or projected from the drain so far
    bool endurance_projected = false;
    std::size_t ctd_samples = 0;
};

struct RunSummary {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string status = "completed";  // completed | fault
    std::string fault;
    double sim_time = 0.0;
    std::uint64_t ticks = 0;
    std::vector<MugSummary> mugs;
    ConservationCounts messages{};
    std::size_t duplicates_suppressed = 0;
    std::size_t sorties_launched = 0;
    std::size_t sorties_completed = 0;
    std::size_t sorties_deferred = 0;
    std::size_t sorties_aborted = 0;
    std::size_t pickups_failed = 0;
    std::size_t emergency_landings = 0;
    std::size_t reserve_violations = 0;  // sorties that docked below their reserve
    double min_dock_margin_wh = 0.0;     // smallest (charge at dock - reserve) over completed sorties
    std::map<std::string, double> final_charge;
    EnergyAudit energy{};
    std::string telemetry_digest;
    std::size_t telemetry_rows = 0;
};

enum class CommandStatus { Accepted, Rejected, QueuedForUplink };
std::string_view to_string(CommandStatus status);

struct CommandOutcome {
    CommandStatus status = CommandStatus::Rejected;
    std::string reason;
    bool acoustic = false;  // also sent over the acoustic channel
};

// Record of a delivered command for causality checks.
struct CommandDelivery {
    std::string command_id;
    std::string vehicle;
    double delivered_at = 0.0;
    bool applied = false;
};

struct SimulationOptions {
    std::optional<std::uint64_t> seed;        // overrides the scenario seed
    std::optional<double> duration;           // overrides the scenario duration
    std::optional<double> decimation;         // overrides the telemetry decimation
    std::optional<std::string> output_dir;    // write telemetry/events/summary here
};

class Simulation {
public:
    explicit Simulation(ScenarioConfig config, SimulationOptions options = {});

    // Advances one tick. Throws std::logic_error if already finished.
    void step();
    bool finished() const;
    // Runs to the end, writes outputs and returns the summary.
    RunSummary run();
    RunSummary summary() const;

    // Vehicle commands enter the network at the USV; sim-control verbs are
    // rejected here (the pacing layer owns them). Idempotent by command_id.
    CommandOutcome submit(const OperatorCommand& command);

    double now() const { return world_.sim_time; }
    const WorldState& world() const { return world_; }
    const ScenarioConfig& config() const { return config_; }
    const KnowledgeBase& knowledge() const { return knowledge_; }
    const std::vector<CommandDelivery>& command_deliveries() const { return command_deliveries_; }
    const std::vector<SortiePlan>& active_plans() const { return world_.coordinator.active; }
    // Per completed sortie: charge at dock minus its reserve (Wh).
    const std::vector<double>& dock_margins() const { return dock_margins_; }
    std::string telemetry_digest();
    const std::string& fault() const { return fault_; }

    // Snapshot the coordinator would see right now.
    CoordinatorSnapshot coordinator_snapshot() const;

private:
    void log(double time, const std::string& kind, const std::string& vehicle, std::string json);
    void emit_state_rows();
    void check_invariants();
    void fault(const std::string& what);
    void apply_delivery(const Delivery& d);
    void dispatch(const ScheduledEvent& ev);
    void launch_sortie(const SortiePlan& plan);
    bool apply_command_at(const std::string& vehicle, const OperatorCommand& cmd, double now);
    void observe_first_hand();
    void write_outputs(const RunSummary& s) const;

    ScenarioConfig config_;
    SimulationOptions options_;
    WorldState world_;
    KnowledgeBase knowledge_;
    std::unique_ptr<TelemetrySink> sink_;
    std::vector<LogEvent> tick_events_;
    std::map<std::string, double> tx_seconds_;
    std::map<std::string, CommandOutcome> submitted_;
    std::map<std::string, std::set<std::string>> applied_commands_;
    std::vector<CommandDelivery> command_deliveries_;
    std::vector<double> dock_margins_;
    std::size_t decimation_ticks_ = 10;
    std::size_t decision_ticks_ = 60;
    std::uint64_t total_ticks_ = 0;
    double harvested_ = 0.0;
    double consumed_ = 0.0;
    double initial_total_ = 0.0;
    std::size_t duplicates_ = 0;
    std::size_t sorties_completed_ = 0;
    std::size_t sorties_aborted_ = 0;
    std::size_t pickups_failed_ = 0;
    std::size_t emergency_landings_ = 0;
    std::size_t reserve_violations_ = 0;
    bool ever_deployed_ = false;
    bool complete_ = false;
    std::string fault_;
};

void write_summary_files(const RunSummary& s, const std::string& directory);
std::string summary_json(const RunSummary& s);

}  // namespace oasys
