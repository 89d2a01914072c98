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

#include "oasys/messages.hpp"

#include <array>
#include <utility>

namespace oasys {

namespace {

constexpr std::array<std::pair<CommandVerb, std::string_view>, 8> kVerbs{{
    {CommandVerb::SetTargetDepth, "SET_TARGET_DEPTH"},
    {CommandVerb::SetDropPoint, "SET_DROP_POINT"},
    {CommandVerb::RequestRecovery, "REQUEST_RECOVERY"},
    {CommandVerb::AbortSortie, "ABORT_SORTIE"},
    {CommandVerb::RetaskUsvTrack, "RETASK_USV_TRACK"},
    {CommandVerb::PauseSim, "PAUSE_SIM"},
    {CommandVerb::ResumeSim, "RESUME_SIM"},
    {CommandVerb::SetSimSpeed, "SET_SIM_SPEED"},
}};

}  // namespace

std::string to_string(const MessageId& id) { return id.origin + "#" + std::to_string(id.sequence); }

std::string_view to_string(MessageKind kind) {
    switch (kind) {
        case MessageKind::Telemetry: return "telemetry";
        case MessageKind::Command: return "command";
        case MessageKind::Ack: return "ack";
    }
    return "unknown";
}

std::string_view to_string(CommandVerb verb) {
    for (const auto& [v, name] : kVerbs)
        if (v == verb) return name;
    return "UNKNOWN";
}

std::optional<CommandVerb> parse_verb(std::string_view text) {
    for (const auto& [v, name] : kVerbs)
        if (name == text) return v;
    return std::nullopt;
}

bool is_sim_control(CommandVerb verb) {
    return verb == CommandVerb::PauseSim || verb == CommandVerb::ResumeSim || verb == CommandVerb::SetSimSpeed;
}

}  // namespace oasys
