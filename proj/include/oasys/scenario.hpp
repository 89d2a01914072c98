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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oasys/comms.hpp"
#include "oasys/coordinator.hpp"
#include "oasys/mug.hpp"
#include "oasys/uav.hpp"
#include "oasys/usv.hpp"

namespace oasys {

// Load or validation failure. `field` is "section.key" where one applies.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string field, const std::string& message);
    const std::string& field() const { return field_; }
    const std::string& message() const { return message_; }

private:
    std::string field_;
    std::string message_;
};

struct MugSpec {
    std::string id;
    MugParams params{};
    bool in_bay = true;             // stowed on the USV at t = 0
    Vec2 position{};                // start position when not in the bay
    std::optional<Vec2> drop_point; // deployment target for a stowed MUG
    double deploy_at = 0.0;         // earliest deployment time
};

struct UavSpec {
    std::string id;
    UavParams params{};
};

struct UsvSpec {
    std::string id;
    UsvParams params{};
    Vec2 position{};
    std::vector<Vec2> track;
};

struct ScheduledCommand {
    double at = 0.0;
    OperatorCommand command;
};

// A sortie launched at a fixed time regardless of the coordinator, with the
// in-flight reserve guard switched off.
struct ForcedSortie {
    double at = 0.0;
    std::string uav_id;
    Vec2 station{};
    double duration = 0.0;  // loiter time at the station
};

struct FaultInjection {
    std::optional<ForcedSortie> forced_sortie;
};

struct ScenarioConfig {
    std::string name = "unnamed";
    double duration = 259200.0;  // s
    double dt = 1.0;             // s
    std::uint64_t seed = 1;
    double decimation = 10.0;    // s between telemetry state rows
    bool stop_when_complete = false;  // end once every MUG is back in the bay after a mission
    Environment env{};
    double seafloor_depth = 1000.0;  // m, constant bathymetry
    CommsConfig comms{};
    RadioParams radio{};
    double mug_antenna_height = 0.1;  // m while surfaced
    double uplink_latency = 60.0;     // s, USV to shore
    CoordinatorConfig coordinator{};
    std::vector<MugSpec> mugs;  // ascending id
    std::vector<UavSpec> uavs;  // ascending id
    std::optional<UsvSpec> usv;
    std::vector<ScheduledCommand> commands;
    FaultInjection faults;

    // Throws ScenarioError naming the offending field.
    void validate() const;
};

// Parses the sectioned key/value scenario text. Unknown sections or keys are
// errors. The result is validated.
ScenarioConfig load_scenario(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

}  // namespace oasys
