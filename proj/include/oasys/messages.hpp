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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "oasys/geometry.hpp"

namespace oasys {

using NodeId = std::string;

struct MessageId {
    NodeId origin;
    std::uint64_t sequence = 0;

    auto operator<=>(const MessageId&) const = default;
    bool operator==(const MessageId&) const = default;
};

std::string to_string(const MessageId& id);

enum class MessageKind { Telemetry, Command, Ack };
std::string_view to_string(MessageKind kind);

// State report a vehicle sends home. Positions are the vehicle's own
// estimate, never ground truth.
struct VehicleReport {
    std::string vehicle_id;
    std::string vehicle_type;  // "mug" | "uav" | "usv"
    std::string mode;
    Vec2 position_estimate{};
    double altitude = 0.0;
    double depth = 0.0;
    double sigma = 0.0;
    double battery_wh = 0.0;
    int yo_count = 0;
    double target_depth = 0.0;
    std::string task;
    std::size_t queue_depth = 0;
    std::size_t ctd_samples = 0;
    double sampled_at = 0.0;
};

enum class CommandVerb {
    SetTargetDepth,
    SetDropPoint,
    RequestRecovery,
    AbortSortie,
    RetaskUsvTrack,
    PauseSim,
    ResumeSim,
    SetSimSpeed,
};

std::string_view to_string(CommandVerb verb);
std::optional<CommandVerb> parse_verb(std::string_view text);
bool is_sim_control(CommandVerb verb);

struct OperatorCommand {
    std::string command_id;
    std::string target;  // vehicle id, or "sim" for sim-control verbs
    CommandVerb verb = CommandVerb::PauseSim;
    double value = 0.0;         // depth (m) or speed factor
    Vec2 point{};               // drop point
    std::vector<Vec2> track{};  // USV waypoints
    double issued_at = 0.0;
};

struct Ack {
    MessageId acked;
};

using MessageBody = std::variant<std::monostate, VehicleReport, OperatorCommand, Ack>;

struct Message {
    MessageId id;
    MessageKind kind = MessageKind::Telemetry;
    std::size_t payload_size = 0;  // bytes
    double created_at = 0.0;
    NodeId destination;
    std::vector<NodeId> hops;  // begins with the origin
    std::optional<double> delivered_at;
    MessageBody body;
};

}  // namespace oasys
